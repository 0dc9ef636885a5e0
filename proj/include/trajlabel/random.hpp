// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace trajlabel
{

/// Philox4x32-10 block function (Salmon et al., Random123). Pure: the same counter and key
/// always yield the same four words on every platform.
std::array<std::uint32_t, 4> philox4x32_10(
  std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Identifies an independent random stream. Streams are split per (scene, frame, purpose), so
/// results do not depend on the order in which scenes or frames are generated.
struct StreamId
{
  std::uint32_t scene = 0;
  std::uint32_t frame = 0;
  std::uint32_t purpose = 0;
};

/// Stable 32-bit FNV-1a hash, used to derive stream ids from scene names.
std::uint32_t stream_hash(std::string_view text);

/// Sequential draws from one Philox stream. The fourth counter word counts blocks.
///
/// Distributions are implemented here rather than through <random> so that the sequence is
/// identical across standard libraries: uniform doubles take the top 53 bits of a 64-bit
/// draw, normals use one Box-Muller output per pair of uniforms, and Poisson uses Knuth's
/// product method (normal approximation above mean 30).
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, StreamId stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  int poisson(double mean);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace trajlabel
