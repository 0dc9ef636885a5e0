// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trajlabel/training.hpp"

namespace trajlabel
{
namespace
{

std::vector<std::pair<Box3D, WeightedLabel>> random_assignments(std::uint64_t seed, int n)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> j(0.0, 0.5);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  std::uniform_int_distribution<int> cls(0, 2);
  std::vector<std::pair<Box3D, WeightedLabel>> out;
  for (int i = 0; i < n; ++i) {
    const Box3D target = make_box(j(rng) * 10, j(rng) * 10, 0.8, 4.5, 1.9, 1.6, j(rng), cls(rng), 0.7);
    Box3D pred = target;
    pred.x += j(rng);
    pred.yaw = normalize_yaw(pred.yaw + j(rng));
    pred.class_id = cls(rng);
    out.push_back({pred, {target, w(rng), LabelOrigin::Teacher, -1}});
  }
  return out;
}

TEST(EmaUpdate, SingleStep)
{
  const auto out = ema_update({{0.0}}, {{1.0}}, 0.999);
  ASSERT_EQ(out.values.size(), 1u);
  EXPECT_NEAR(out.values[0], 0.001, 1e-15);
}

TEST(EmaUpdate, FrozenAndCopy)
{
  const ParameterVector t{{1.5, -2.0, 3.0}}, s{{0.0, 7.0, -1.0}};
  EXPECT_EQ(ema_update(t, s, 1.0), t);
  EXPECT_EQ(ema_update(t, s, 0.0), s);
}

TEST(EmaUpdate, GeometricClosedForm)
{
  const ParameterVector s{{1.0, -3.0, 0.25, 100.0}};
  for (double m : {0.5, 0.9, 0.999}) {
    for (int n : {1, 10, 1000}) {
      ParameterVector t{{0.0, 2.0, -0.75, 0.0}};
      const ParameterVector t0 = t;
      for (int i = 0; i < n; ++i) t = ema_update(t, s, m);
      for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double want = s.values[k] + std::pow(m, n) * (t0.values[k] - s.values[k]);
        EXPECT_NEAR(t.values[k], want, 1e-12) << "m=" << m << " n=" << n;
      }
    }
  }
}

TEST(EmaUpdate, RejectsBadInput)
{
  EXPECT_THROW(ema_update({{1.0}}, {{1.0, 2.0}}, 0.5), std::invalid_argument);
  EXPECT_THROW(ema_update({{1.0}}, {{1.0}}, 1.5), std::invalid_argument);
  EXPECT_THROW(ema_update({{1.0}}, {{1.0}}, -0.1), std::invalid_argument);
}

TEST(ReferenceLoss, ZeroAtIdentity)
{
  const BoxLossTerms terms = reference_loss_terms();
  const Box3D b = make_box(1, 2, 3, 4, 2, 1.5, 3.1, kBus, 1.0);
  EXPECT_EQ(terms.reg(b, b), 0.0);
  EXPECT_EQ(terms.cls(b, b), 0.0);
  Box3D c = b;
  c.yaw = normalize_yaw(b.yaw + 0.2);  // wraps past pi
  EXPECT_NEAR(terms.reg(c, b), 0.2 / 7.0, 1e-12);
}

TEST(UnlabeledLoss, EmptyAndScaling)
{
  const BoxLossTerms terms = reference_loss_terms();
  EXPECT_EQ(unlabeled_loss({}, terms), 0.0);

  BoxLossTerms constant;
  constant.reg = [](const Box3D &, const Box3D &) { return 1.5; };
  constant.cls = [](const Box3D &, const Box3D &) { return 0.5; };
  const std::vector<std::pair<Box3D, WeightedLabel>> one{{Box3D{}, {Box3D{}, 1.75, LabelOrigin::Teacher, -1}}};
  EXPECT_EQ(unlabeled_loss(one, constant), 3.5);
}

TEST(UnlabeledLoss, LinearInWeights)
{
  const BoxLossTerms terms = reference_loss_terms();
  auto a = random_assignments(4, 50);
  const double base = unlabeled_loss(a, terms);
  auto doubled = a;
  for (auto & [p, l] : doubled) l.weight *= 2.0;
  EXPECT_EQ(unlabeled_loss(doubled, terms), 2.0 * base);

  // Additivity in the weight vector.
  auto b = random_assignments(4, 50);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (auto & [p, l] : b) l.weight = w(rng);
  auto sum = a;
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i].second.weight += b[i].second.weight;
  EXPECT_NEAR(unlabeled_loss(sum, terms), base + unlabeled_loss(b, terms), 1e-12 * base);
}

TEST(UnlabeledLoss, RejectsNegativeWeight)
{
  std::vector<std::pair<Box3D, WeightedLabel>> a{{Box3D{}, {Box3D{}, -1.0, LabelOrigin::Teacher, -1}}};
  EXPECT_THROW(unlabeled_loss(a, reference_loss_terms()), std::invalid_argument);
}

TEST(LabeledLoss, EqualsUnitWeightUnlabeled)
{
  const BoxLossTerms terms = reference_loss_terms();
  auto a = random_assignments(5, 40);
  std::vector<std::pair<Box3D, Box3D>> plain;
  for (auto & [p, l] : a) {
    l.weight = 1.0;
    plain.push_back({p, l.box});
  }
  EXPECT_EQ(labeled_loss(plain, terms), unlabeled_loss(a, terms));
  EXPECT_EQ(labeled_loss({}, terms), 0.0);
  std::vector<std::pair<Box3D, Box3D>> same;
  for (const auto & [p, t] : plain) same.push_back({t, t});
  EXPECT_EQ(labeled_loss(same, terms), 0.0);
}

TEST(UnlabeledLoss, BaselineLimitScalesByAlpha)
{
  // With beta = 0 and no insertions every weight is alpha.
  const BoxLossTerms terms = reference_loss_terms();
  auto a = random_assignments(6, 30);
  std::vector<std::pair<Box3D, Box3D>> plain;
  for (auto & [p, l] : a) {
    l.weight = 2.0;
    plain.push_back({p, l.box});
  }
  EXPECT_EQ(unlabeled_loss(a, terms), 2.0 * labeled_loss(plain, terms));
}

TEST(TotalLoss, Sum)
{
  EXPECT_EQ(total_loss(0.0, 0.0), 0.0);
  EXPECT_EQ(total_loss(1.5, 2.5), 4.0);
  EXPECT_EQ(total_loss(0.1, 0.7), total_loss(0.7, 0.1));
}

}  // namespace
}  // namespace trajlabel
