// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/enhancer.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "trajlabel/geometry.hpp"

namespace trajlabel
{

std::vector<std::string> EnhancerConfig::validate() const
{
  std::vector<std::string> out;
  auto unit = [&](double v, const char * name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      out.push_back(std::string("enhancer: ") + name + " must lie in [0, 1]");
    }
  };
  unit(tau_min_iou, "tau_min_iou");
  unit(tau_max_iou, "tau_max_iou");
  unit(insertion_nms_iou, "insertion_nms_iou");
  if (!(alpha > 0.0)) {
    out.push_back("enhancer: alpha must be > 0");
  }
  if (!(beta >= 0.0)) {
    out.push_back("enhancer: beta must be >= 0");
  }
  if (!(gamma_min > 0.0 && gamma_min <= gamma_max && gamma_max <= 1.0)) {
    out.push_back("enhancer: need 0 < gamma_min <= gamma_max <= 1");
  }
  if (gamma_horizon < 1) {
    out.push_back("enhancer: gamma_horizon must be >= 1");
  }
  return out;
}

double max_same_class_iou(const Box3D & box, const ForecastSet & set)
{
  double best = 0.0;
  for (const ForecastBox & fb : set.boxes) {
    if (fb.box.class_id == box.class_id) {
      best = std::max(best, bev_iou(box, fb.box));
    }
  }
  return best;
}

std::vector<int> match_counts(
  std::span<const Box3D> pseudo_labels, std::span<const ForecastSet> forecast_sets,
  double tau_min_iou)
{
  std::vector<int> counts;
  counts.reserve(pseudo_labels.size());
  std::set<int> hit_contexts;
  for (const Box3D & label : pseudo_labels) {
    hit_contexts.clear();
    for (const ForecastSet & set : forecast_sets) {
      if (hit_contexts.count(set.context_frame)) {
        continue;
      }
      if (max_same_class_iou(label, set) >= tau_min_iou) {
        hit_contexts.insert(set.context_frame);
      }
    }
    counts.push_back(static_cast<int>(hit_contexts.size()));
  }
  return counts;
}

std::vector<double> compute_weights(std::span<const int> counts, double alpha, double beta)
{
  std::vector<double> out;
  out.reserve(counts.size());
  for (int c : counts) {
    out.push_back(alpha + beta * c);
  }
  return out;
}

std::vector<std::pair<int, Box3D>> find_unmatched(
  std::span<const ForecastSet> forecast_sets, std::span<const Box3D> pseudo_labels,
  double tau_max_iou)
{
  std::vector<std::pair<int, Box3D>> out;
  for (const ForecastSet & set : forecast_sets) {
    for (const ForecastBox & fb : set.boxes) {
      double best = 0.0;
      for (const Box3D & label : pseudo_labels) {
        if (label.class_id == fb.box.class_id) {
          best = std::max(best, bev_iou(fb.box, label));
        }
      }
      if (best <= tau_max_iou) {
        out.emplace_back(set.context_frame, fb.box);
      }
    }
  }
  return out;
}

std::vector<double> gamma_schedule(int num_context_frames, double gamma_max, double gamma_min)
{
  if (num_context_frames < 1) {
    throw std::invalid_argument("gamma_schedule needs at least one context frame");
  }
  const double step =
    (gamma_max - gamma_min) / static_cast<double>(std::max(num_context_frames - 1, 1));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(num_context_frames));
  for (int k = 0; k < num_context_frames; ++k) {
    out.push_back(gamma_max - k * step);
  }
  if (num_context_frames >= 2) {
    out.back() = gamma_min;
  }
  return out;
}

std::vector<std::pair<int, Box3D>> dedup_insertions(
  std::span<const std::pair<int, Box3D>> candidates, double nms_iou)
{
  std::vector<std::pair<int, Box3D>> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto & a, const auto & b) {
    return a.first > b.first;
  });
  std::vector<std::pair<int, Box3D>> kept;
  for (const auto & cand : ranked) {
    bool suppressed = false;
    for (const auto & k : kept) {
      if (k.second.class_id == cand.second.class_id && bev_iou(k.second, cand.second) > nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(cand);
    }
  }
  return kept;
}

EnhancedFrame enhance_frame(
  const Frame & frame, std::span<const ForecastSet> forecast_sets, const EnhancerConfig & cfg)
{
  for (const ForecastSet & s : forecast_sets) {
    if (s.target_frame != frame.frame_index) {
      throw std::invalid_argument(
        "enhance_frame: forecast set targets frame " + std::to_string(s.target_frame) +
        ", expected " + std::to_string(frame.frame_index));
    }
  }
  EnhancedFrame out;
  out.scene_id = frame.scene_id;
  out.frame_index = frame.frame_index;

  const std::vector<int> counts = match_counts(frame.boxes, forecast_sets, cfg.tau_min_iou);
  const std::vector<double> weights = compute_weights(counts, cfg.alpha, cfg.beta);
  out.labels.reserve(frame.boxes.size());
  for (std::size_t i = 0; i < frame.boxes.size(); ++i) {
    out.labels.push_back({frame.boxes[i], weights[i], LabelOrigin::Teacher, -1});
    out.match_counts.push_back(counts[i]);
  }

  if (cfg.insert_unmatched && !forecast_sets.empty()) {
    const auto unmatched = find_unmatched(forecast_sets, frame.boxes, cfg.tau_max_iou);
    const auto kept = dedup_insertions(unmatched, cfg.insertion_nms_iou);
    const std::vector<double> gamma = gamma_schedule(cfg.gamma_horizon, cfg.gamma_max, cfg.gamma_min);
    for (const auto & [context, box] : kept) {
      const int age = frame.frame_index - context;
      const double g = age >= 1 && age <= cfg.gamma_horizon
                         ? gamma[static_cast<std::size_t>(age - 1)]
                         : cfg.gamma_min;
      out.labels.push_back({box, g, LabelOrigin::Inserted, context});
      out.match_counts.push_back(0);
    }
  }
  return out;
}

}  // namespace trajlabel
