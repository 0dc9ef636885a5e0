// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "trajlabel/random.hpp"

namespace trajlabel
{
namespace
{

using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers)
{
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(StreamHash, Fnv1a)
{
  EXPECT_EQ(stream_hash(""), 0x811c9dc5u);
  EXPECT_EQ(stream_hash("a"), 0xe40c292cu);
  EXPECT_NE(stream_hash("scene-0000"), stream_hash("scene-0001"));
}

TEST(CounterRng, ReproducibleAndStreamSeparated)
{
  CounterRng a(42, {1, 2, 3}), b(42, {1, 2, 3}), c(42, {1, 2, 4}), d(43, {1, 2, 3});
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u32();
    EXPECT_EQ(x, b.next_u32());
    differs_c |= x != c.next_u32();
    differs_d |= x != d.next_u32();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(CounterRng, UniformMoments)
{
  CounterRng r(7, {0, 0, 0});
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform(-3.0, 5.0);
    EXPECT_GE(u, -3.0);
    EXPECT_LT(u, 5.0);
  }
}

TEST(CounterRng, NormalMoments)
{
  CounterRng r(8, {0, 0, 1});
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(2.0, 3.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 2.0, 0.03);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 3.0, 0.03);
}

TEST(CounterRng, PoissonMeans)
{
  for (double lambda : {0.0, 0.5, 2.0, 12.0, 80.0}) {
    CounterRng r(9, {0, 0, 2});
    const int n = 50000;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const int k = r.poisson(lambda);
      ASSERT_GE(k, 0);
      s += k;
    }
    EXPECT_NEAR(s / n, lambda, 0.03 * std::max(1.0, lambda)) << lambda;
  }
}

TEST(CounterRng, BelowIsUnbiasedAndInRange)
{
  CounterRng r(10, {0, 0, 3});
  std::array<int, 7> hist{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++hist[k];
  }
  for (int h : hist) EXPECT_NEAR(h, n / 7, 400);
  EXPECT_EQ(r.below(1), 0u);
}

}  // namespace
}  // namespace trajlabel
