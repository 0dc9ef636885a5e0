// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "trajlabel/types.hpp"

namespace trajlabel
{

struct ParameterVector
{
  std::vector<double> values;

  bool operator==(const ParameterVector &) const = default;
};

/// momentum * teacher + (1 - momentum) * student, element-wise.
/// Throws std::invalid_argument on length mismatch or momentum outside [0, 1].
ParameterVector ema_update(
  const ParameterVector & teacher, const ParameterVector & student, double momentum);

/// Per-box regression and classification terms. Both must be >= 0.
struct BoxLossTerms
{
  std::function<double(const Box3D & pred, const Box3D & target)> reg;
  std::function<double(const Box3D & pred, const Box3D & target)> cls;
};

/// Mean absolute error over (x, y, z, l, w, h, yaw), with yaw compared as a wrapped angle,
/// and 0/1 class disagreement.
BoxLossTerms reference_loss_terms();

/// Σ weight * (reg + cls) in input order. Throws std::invalid_argument on a negative weight.
double unlabeled_loss(
  std::span<const std::pair<Box3D, WeightedLabel>> assignments, const BoxLossTerms & terms);

/// Σ (reg + cls) in input order.
double labeled_loss(std::span<const std::pair<Box3D, Box3D>> assignments, const BoxLossTerms & terms);

inline double total_loss(double unlabeled, double labeled) { return unlabeled + labeled; }

}  // namespace trajlabel
