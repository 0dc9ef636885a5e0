// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trajlabel/geometry.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel
{

struct HistoryPoint
{
  double timestamp = 0.0;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

/// (history oldest-first, horizon, dt) -> `horizon` future centers spaced by dt.
using Predictor =
  std::function<std::vector<Vec2>(std::span<const HistoryPoint>, int horizon, double dt)>;

enum class PredictorKind { ConstantVelocity, ConstantTurnRate, LinearVelocity };

PredictorKind parse_predictor_kind(const std::string & name);
std::string to_string(PredictorKind kind);

struct ForecastConfig
{
  int min_context = 2;
  int max_context = 4;
  int horizon = 12;
  PredictorKind predictor = PredictorKind::ConstantTurnRate;

  std::vector<std::string> validate() const;
};

/// Finite-difference velocity from the last two points, extrapolated linearly.
/// Throws std::invalid_argument for fewer than two points.
std::vector<Vec2> predict_cv(std::span<const HistoryPoint> history, int horizon, double dt);

/// Constant speed and turn rate fitted to the last three points, advanced along the arc.
/// Throws std::invalid_argument for fewer than three points.
std::vector<Vec2> predict_ctrv(std::span<const HistoryPoint> history, int horizon, double dt);

/// Extrapolates the box's reported velocity.
std::vector<Vec2> predict_linear_velocity(const Box3D & last_box, int horizon, double dt);

/// Minimum history length `kind` needs.
int min_history(PredictorKind kind);

Predictor make_predictor(PredictorKind kind);

/// Places a context box at a forecast center; all other attributes are copied.
Box3D materialize_box(const Vec2 & predicted_xy, const Box3D & context_box);

/// Forecasts, grouped by (context frame, target frame), sorted by that key and by track id
/// within a set. When a track's context is shorter than the configured predictor needs,
/// falls back to constant velocity.
std::vector<ForecastSet> generate_forecasts(
  std::span<const Track> tracks, const Scene & scene, const ForecastConfig & cfg);

/// Same, with a caller-supplied predictor that handles any history of >= min_context points.
std::vector<ForecastSet> generate_forecasts(
  std::span<const Track> tracks, const Scene & scene, const ForecastConfig & cfg,
  const Predictor & predictor);

/// Forecast sets whose target is `target_frame`. `sets` must be sorted as generate_forecasts
/// emits them or by any order; the result preserves input order.
std::vector<ForecastSet> sets_for_target(std::span<const ForecastSet> sets, int target_frame);

}  // namespace trajlabel
