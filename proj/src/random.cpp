// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/random.hpp"

#include <cmath>
#include <numbers>

namespace trajlabel
{

namespace
{

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t & hi, std::uint32_t & lo)
{
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(
  std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint32_t stream_hash(std::string_view text)
{
  std::uint32_t h = 2166136261u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

CounterRng::CounterRng(std::uint64_t seed, StreamId stream)
: key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
  counter_{stream.scene, stream.frame, stream.purpose, 0}
{
}

void CounterRng::refill()
{
  block_ = philox4x32_10(counter_, key_);
  counter_[3] += 1;
  used_ = 0;
}

std::uint32_t CounterRng::next_u32()
{
  if (used_ >= 4) {
    refill();
  }
  return block_[static_cast<std::size_t>(used_++)];
}

std::uint64_t CounterRng::next_u64()
{
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double CounterRng::uniform()
{
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal(double mean, double stddev)
{
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

int CounterRng::poisson(double mean)
{
  if (!(mean > 0.0)) {
    return 0;
  }
  if (mean > 30.0) {
    const double draw = std::round(normal(mean, std::sqrt(mean)));
    return draw < 0.0 ? 0 : static_cast<int>(draw);
  }
  const double limit = std::exp(-mean);
  int k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next_u64();
  while (v >= limit) {
    v = next_u64();
  }
  return v % n;
}

}  // namespace trajlabel
