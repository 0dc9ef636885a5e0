// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajlabel/types.hpp"

namespace trajlabel
{

/// Temporal-consistency weighting and forecast insertion.
///
/// A pseudo-label at frame t is weighted `alpha + beta * n`, where n is the number of context
/// frames c in [t - T, t - 1] whose forecast set overlaps the label at IoU >= tau_min_iou.
/// Forecasts overlapping no label above tau_max_iou are inserted as soft targets weighted by a
/// linearly decreasing schedule over context age t - c.
struct EnhancerConfig
{
  double tau_min_iou = 0.3;
  double tau_max_iou = 0.1;
  double alpha = 1.0;
  double beta = 0.25;
  double gamma_max = 0.8;
  double gamma_min = 0.2;
  double insertion_nms_iou = 0.3;
  // Length of the gamma schedule; ages beyond it take gamma_min.
  int gamma_horizon = 12;
  bool insert_unmatched = true;

  std::vector<std::string> validate() const;
};

/// Max same-class BEV IoU between `box` and any box of `set`.
double max_same_class_iou(const Box3D & box, const ForecastSet & set);

/// Per label, how many distinct context frames overlap it at IoU >= tau_min_iou.
std::vector<int> match_counts(
  std::span<const Box3D> pseudo_labels, std::span<const ForecastSet> forecast_sets,
  double tau_min_iou);

std::vector<double> compute_weights(std::span<const int> counts, double alpha, double beta);

/// Forecast boxes whose best same-class IoU with every pseudo-label is <= tau_max_iou,
/// tagged with their context frame. Order follows the input sets.
std::vector<std::pair<int, Box3D>> find_unmatched(
  std::span<const ForecastSet> forecast_sets, std::span<const Box3D> pseudo_labels,
  double tau_max_iou);

/// Linear weights from gamma_max (index 0, the most recent context frame) to gamma_min.
std::vector<double> gamma_schedule(int num_context_frames, double gamma_max, double gamma_min);

/// Greedy same-class NMS. Candidates are ranked by context frame, most recent first; a
/// candidate is dropped when its IoU with a kept box exceeds `nms_iou`.
std::vector<std::pair<int, Box3D>> dedup_insertions(
  std::span<const std::pair<int, Box3D>> candidates, double nms_iou);

/// Teacher labels (weighted by match count) followed by deduplicated insertions.
/// `frame` holds the confidence-filtered pseudo-labels; every set must target it.
EnhancedFrame enhance_frame(
  const Frame & frame, std::span<const ForecastSet> forecast_sets, const EnhancerConfig & cfg);

}  // namespace trajlabel
