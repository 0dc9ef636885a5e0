// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used as test oracles. Nothing here calls into the
// library code paths being checked, except bev_iou where the oracle tests counting logic.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "trajlabel/geometry.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel::oracle
{

inline bool point_in_box(const Box3D & b, double px, double py)
{
  const double dx = px - b.x;
  const double dy = py - b.y;
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  return std::abs(dx * c + dy * s) <= b.l / 2 && std::abs(-dx * s + dy * c) <= b.w / 2;
}

/// BEV IoU by uniform sampling over the axis-aligned hull of both footprints.
inline double monte_carlo_iou(const Box3D & a, const Box3D & b, int samples, std::uint64_t seed)
{
  auto radius = [](const Box3D & q) { return 0.5 * std::hypot(q.l, q.w); };
  const double x0 = std::min(a.x - radius(a), b.x - radius(b));
  const double x1 = std::max(a.x + radius(a), b.x + radius(b));
  const double y0 = std::min(a.y - radius(a), b.y - radius(b));
  const double y1 = std::max(a.y + radius(a), b.y + radius(b));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  long in_a = 0, in_b = 0, both = 0;
  for (int i = 0; i < samples; ++i) {
    const double px = ux(rng);
    const double py = uy(rng);
    const bool ia = point_in_box(a, px, py);
    const bool ib = point_in_box(b, px, py);
    in_a += ia;
    in_b += ib;
    both += ia && ib;
  }
  const long uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : double(both) / double(uni);
}

/// Number of distinct context frames holding a same-class forecast with IoU >= tau.
inline std::vector<int> match_counts(
  const std::vector<Box3D> & labels, const std::vector<ForecastSet> & sets, double tau)
{
  std::vector<int> out;
  for (const Box3D & label : labels) {
    std::set<int> hit;
    for (const ForecastSet & s : sets) {
      for (const ForecastBox & f : s.boxes) {
        if (f.box.class_id == label.class_id && bev_iou(f.box, label) >= tau) {
          hit.insert(s.context_frame);
        }
      }
    }
    out.push_back(static_cast<int>(hit.size()));
  }
  return out;
}

/// Greedy matching by the literal rule: each pred in order takes the nearest unmatched
/// same-class gt within `thr`. Returns the pred -> gt assignment (-1 if none).
inline std::vector<int> greedy_center_match(
  const std::vector<Box3D> & preds, const std::vector<Box3D> & gts, double thr)
{
  std::vector<int> assign(preds.size(), -1);
  std::vector<bool> used(gts.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    int best = -1;
    double best_d = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].class_id != preds[p].class_id) continue;
      const double d = std::hypot(preds[p].x - gts[g].x, preds[p].y - gts[g].y);
      if (d <= thr && (best < 0 || d < best_d)) {
        best = static_cast<int>(g);
        best_d = d;
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      assign[p] = best;
    }
  }
  return assign;
}

struct OraclePred
{
  int frame;
  std::size_t index;
  double score;
  Box3D box;
};

/// AP of one class from first principles: for every cutoff k of the ranked list, rematch the
/// top-k predictions from scratch, then integrate the monotone precision envelope over recall.
inline double brute_force_ap(
  std::vector<OraclePred> preds, const std::vector<std::vector<Box3D>> & gts, double thr)
{
  std::size_t n_gt = 0;
  for (const auto & f : gts) n_gt += f.size();
  if (n_gt == 0) return 0.0;
  std::stable_sort(preds.begin(), preds.end(), [](const OraclePred & a, const OraclePred & b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.index < b.index;
  });
  std::vector<double> prec, rec;
  for (std::size_t k = 1; k <= preds.size(); ++k) {
    std::size_t tp = 0;
    for (std::size_t f = 0; f < gts.size(); ++f) {
      std::vector<Box3D> in_frame;
      for (std::size_t i = 0; i < k; ++i) {
        if (preds[i].frame == static_cast<int>(f)) in_frame.push_back(preds[i].box);
      }
      for (int a : greedy_center_match(in_frame, gts[f], thr)) tp += a >= 0;
    }
    prec.push_back(double(tp) / double(k));
    rec.push_back(double(tp) / double(n_gt));
  }
  double ap = 0.0;
  double prev_r = 0.0;
  for (std::size_t k = 0; k < prec.size(); ++k) {
    double envelope = 0.0;
    for (std::size_t j = k; j < prec.size(); ++j) envelope = std::max(envelope, prec[j]);
    ap += (rec[k] - prev_r) * envelope;
    prev_r = rec[k];
  }
  return ap;
}

/// Position on a circle of radius v/|w| after `t` seconds, starting at (x0, y0) with heading h0.
inline Vec2 circle_position(double x0, double y0, double h0, double v, double w, double t)
{
  return {x0 + v / w * (std::sin(h0 + w * t) - std::sin(h0)),
          y0 - v / w * (std::cos(h0 + w * t) - std::cos(h0))};
}

}  // namespace trajlabel::oracle
