// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/training.hpp"

#include <cmath>
#include <stdexcept>

namespace trajlabel
{

ParameterVector ema_update(
  const ParameterVector & teacher, const ParameterVector & student, double momentum)
{
  if (teacher.values.size() != student.values.size()) {
    throw std::invalid_argument("ema_update: parameter vectors differ in length");
  }
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw std::invalid_argument("ema_update: momentum must lie in [0, 1]");
  }
  ParameterVector out;
  out.values.resize(teacher.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = momentum * teacher.values[i] + (1.0 - momentum) * student.values[i];
  }
  return out;
}

BoxLossTerms reference_loss_terms()
{
  BoxLossTerms terms;
  terms.reg = [](const Box3D & p, const Box3D & t) {
    const double sum = std::abs(p.x - t.x) + std::abs(p.y - t.y) + std::abs(p.z - t.z) +
                       std::abs(p.l - t.l) + std::abs(p.w - t.w) + std::abs(p.h - t.h) +
                       std::abs(normalize_yaw(p.yaw - t.yaw));
    return sum / 7.0;
  };
  terms.cls = [](const Box3D & p, const Box3D & t) { return p.class_id == t.class_id ? 0.0 : 1.0; };
  return terms;
}

double unlabeled_loss(
  std::span<const std::pair<Box3D, WeightedLabel>> assignments, const BoxLossTerms & terms)
{
  double total = 0.0;
  for (const auto & [pred, label] : assignments) {
    if (label.weight < 0.0) {
      throw std::invalid_argument("unlabeled_loss: negative label weight");
    }
    total += label.weight * (terms.reg(pred, label.box) + terms.cls(pred, label.box));
  }
  return total;
}

double labeled_loss(std::span<const std::pair<Box3D, Box3D>> assignments, const BoxLossTerms & terms)
{
  double total = 0.0;
  for (const auto & [pred, target] : assignments) {
    total += 1.0 * (terms.reg(pred, target) + terms.cls(pred, target));
  }
  return total;
}

}  // namespace trajlabel
