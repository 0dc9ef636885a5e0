// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace trajlabel
{

namespace
{

// Elapsed time between history points; points carrying no timestamps fall back to dt.
double step_time(const HistoryPoint & prev, const HistoryPoint & cur, double dt)
{
  const double d = cur.timestamp - prev.timestamp;
  return d > 0.0 ? d : dt;
}

}  // namespace

PredictorKind parse_predictor_kind(const std::string & name)
{
  if (name == "cv") {
    return PredictorKind::ConstantVelocity;
  }
  if (name == "ctrv") {
    return PredictorKind::ConstantTurnRate;
  }
  if (name == "linear_velocity") {
    return PredictorKind::LinearVelocity;
  }
  throw std::invalid_argument("unknown predictor '" + name + "' (expected cv, ctrv, linear_velocity)");
}

std::string to_string(PredictorKind kind)
{
  switch (kind) {
    case PredictorKind::ConstantVelocity:
      return "cv";
    case PredictorKind::ConstantTurnRate:
      return "ctrv";
    case PredictorKind::LinearVelocity:
      return "linear_velocity";
  }
  return "cv";
}

std::vector<std::string> ForecastConfig::validate() const
{
  std::vector<std::string> out;
  if (min_context < 1) {
    out.push_back("forecast: min_context must be >= 1");
  }
  if (max_context < min_context) {
    out.push_back("forecast: max_context must be >= min_context");
  }
  if (horizon < 1) {
    out.push_back("forecast: horizon must be >= 1");
  }
  return out;
}

std::vector<Vec2> predict_cv(std::span<const HistoryPoint> history, int horizon, double dt)
{
  if (history.size() < 2) {
    throw std::invalid_argument("predict_cv needs at least 2 history points");
  }
  const HistoryPoint & last = history[history.size() - 1];
  const HistoryPoint & prev = history[history.size() - 2];
  const double tau = step_time(prev, last, dt);
  const double vx = (last.x - prev.x) / tau;
  const double vy = (last.y - prev.y) / tau;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  for (int k = 1; k <= horizon; ++k) {
    out.push_back({last.x + k * dt * vx, last.y + k * dt * vy});
  }
  return out;
}

std::vector<Vec2> predict_ctrv(std::span<const HistoryPoint> history, int horizon, double dt)
{
  if (history.size() < 3) {
    throw std::invalid_argument("predict_ctrv needs at least 3 history points");
  }
  const HistoryPoint & p0 = history[history.size() - 3];
  const HistoryPoint & p1 = history[history.size() - 2];
  const HistoryPoint & p2 = history[history.size() - 1];
  const double dt1 = step_time(p0, p1, dt);
  const double dt2 = step_time(p1, p2, dt);
  const double chord1 = std::hypot(p1.x - p0.x, p1.y - p0.y);
  const double chord2 = std::hypot(p2.x - p1.x, p2.y - p1.y);

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  if (chord2 == 0.0) {
    out.assign(static_cast<std::size_t>(std::max(horizon, 0)), Vec2{p2.x, p2.y});
    return out;
  }

  // Chord headings sit at the segment midpoints in time, so their difference over the
  // midpoint spacing is the turn rate, and the heading at p2 is half a step past chord 2.
  const double h2 = std::atan2(p2.y - p1.y, p2.x - p1.x);
  double omega = 0.0;
  if (chord1 > 0.0) {
    const double h1 = std::atan2(p1.y - p0.y, p1.x - p0.x);
    omega = normalize_yaw(h2 - h1) / (0.5 * (dt1 + dt2));
  }
  const double half_turn = 0.5 * omega * dt2;
  if (std::abs(half_turn) < 1e-12) {
    const double vx = (p2.x - p1.x) / dt2;
    const double vy = (p2.y - p1.y) / dt2;
    for (int k = 1; k <= horizon; ++k) {
      out.push_back({p2.x + k * dt * vx, p2.y + k * dt * vy});
    }
    return out;
  }
  // Arc length over chord2 is chord2 * half_turn / sin(half_turn).
  const double speed = chord2 * half_turn / (std::sin(half_turn) * dt2);
  const double heading = h2 + half_turn;
  const double radius = speed / omega;
  for (int k = 1; k <= horizon; ++k) {
    const double th = heading + omega * k * dt;
    out.push_back(
      {p2.x + radius * (std::sin(th) - std::sin(heading)),
       p2.y - radius * (std::cos(th) - std::cos(heading))});
  }
  return out;
}

std::vector<Vec2> predict_linear_velocity(const Box3D & last_box, int horizon, double dt)
{
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
  for (int k = 1; k <= horizon; ++k) {
    out.push_back({last_box.x + k * dt * last_box.vx, last_box.y + k * dt * last_box.vy});
  }
  return out;
}

int min_history(PredictorKind kind)
{
  switch (kind) {
    case PredictorKind::ConstantVelocity:
      return 2;
    case PredictorKind::ConstantTurnRate:
      return 3;
    case PredictorKind::LinearVelocity:
      return 1;
  }
  return 2;
}

Predictor make_predictor(PredictorKind kind)
{
  switch (kind) {
    case PredictorKind::ConstantVelocity:
      return predict_cv;
    case PredictorKind::ConstantTurnRate:
      return predict_ctrv;
    case PredictorKind::LinearVelocity:
      return [](std::span<const HistoryPoint> history, int horizon, double dt) {
        if (history.empty()) {
          throw std::invalid_argument("linear velocity predictor needs a history point");
        }
        const HistoryPoint & p = history.back();
        Box3D b;
        b.x = p.x;
        b.y = p.y;
        b.vx = p.vx;
        b.vy = p.vy;
        return predict_linear_velocity(b, horizon, dt);
      };
  }
  return predict_cv;
}

Box3D materialize_box(const Vec2 & predicted_xy, const Box3D & context_box)
{
  Box3D out = context_box;
  out.x = predicted_xy.x;
  out.y = predicted_xy.y;
  return out;
}

namespace
{

std::vector<ForecastSet> generate_impl(
  std::span<const Track> tracks, const Scene & scene, const ForecastConfig & cfg,
  const std::function<std::vector<Vec2>(std::span<const HistoryPoint>)> & run)
{
  std::vector<ForecastSet> out;
  if (scene.frames.empty() || tracks.empty()) {
    return out;
  }
  std::unordered_map<int, double> timestamp_of;
  for (const Frame & f : scene.frames) {
    timestamp_of.emplace(f.frame_index, f.timestamp);
  }
  const int last_frame = scene.frames.back().frame_index;

  std::map<std::pair<int, int>, std::vector<ForecastBox>> grouped;
  std::vector<HistoryPoint> history;
  for (const Track & track : tracks) {
    const std::size_t n = track.links.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t len = i + 1;
      if (static_cast<int>(len) < cfg.min_context) {
        continue;
      }
      const int context = track.links[i].frame_index;
      if (context >= last_frame) {
        continue;
      }
      const std::size_t take = std::min<std::size_t>(len, static_cast<std::size_t>(cfg.max_context));
      history.clear();
      for (std::size_t j = len - take; j < len; ++j) {
        const TrackLink & link = track.links[j];
        auto ts = timestamp_of.find(link.frame_index);
        const double stamp = ts != timestamp_of.end() ? ts->second : link.frame_index * scene.dt;
        history.push_back({stamp, link.box.x, link.box.y, link.box.vx, link.box.vy});
      }
      const std::vector<Vec2> positions = run(history);
      const Box3D & context_box = track.links[i].box;
      for (int k = 1; k <= cfg.horizon && k <= static_cast<int>(positions.size()); ++k) {
        const int target = context + k;
        if (target > last_frame) {
          break;
        }
        if (!timestamp_of.count(target)) {
          continue;
        }
        grouped[{context, target}].push_back(
          {track.track_id, materialize_box(positions[static_cast<std::size_t>(k - 1)], context_box)});
      }
    }
  }
  out.reserve(grouped.size());
  for (auto & [key, boxes] : grouped) {
    std::stable_sort(boxes.begin(), boxes.end(), [](const ForecastBox & a, const ForecastBox & b) {
      return a.track_id < b.track_id;
    });
    out.push_back({key.first, key.second, std::move(boxes)});
  }
  return out;
}

}  // namespace

std::vector<ForecastSet> generate_forecasts(
  std::span<const Track> tracks, const Scene & scene, const ForecastConfig & cfg)
{
  const Predictor primary = make_predictor(cfg.predictor);
  const int need = min_history(cfg.predictor);
  const double dt = scene.dt;
  return generate_impl(tracks, scene, cfg, [&](std::span<const HistoryPoint> h) {
    if (static_cast<int>(h.size()) >= need) {
      return primary(h, cfg.horizon, dt);
    }
    if (h.size() >= 2) {
      return predict_cv(h, cfg.horizon, dt);
    }
    return make_predictor(PredictorKind::LinearVelocity)(h, cfg.horizon, dt);
  });
}

std::vector<ForecastSet> generate_forecasts(
  std::span<const Track> tracks, const Scene & scene, const ForecastConfig & cfg,
  const Predictor & predictor)
{
  const double dt = scene.dt;
  return generate_impl(tracks, scene, cfg, [&](std::span<const HistoryPoint> h) {
    return predictor(h, cfg.horizon, dt);
  });
}

std::vector<ForecastSet> sets_for_target(std::span<const ForecastSet> sets, int target_frame)
{
  std::vector<ForecastSet> out;
  for (const ForecastSet & s : sets) {
    if (s.target_frame == target_frame) {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace trajlabel
