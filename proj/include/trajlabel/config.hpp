// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajlabel/enhancer.hpp"
#include "trajlabel/eval.hpp"
#include "trajlabel/forecaster.hpp"
#include "trajlabel/simulator.hpp"
#include "trajlabel/tracker.hpp"

namespace trajlabel
{

struct PipelineConfig
{
  double tau_conf = 0.3;
  TrackerConfig tracker;
  ForecastConfig forecast;
  EnhancerConfig enhancer;
  MatchCriterion eval;
  int jobs = 1;
  std::filesystem::path output_dir = "out";
  SimulationConfig simulation;
  int batch_size = 2;
  std::uint64_t manifest_seed = 0;

  std::vector<std::string> validate() const;
};

/// Thrown for unknown keys, wrong types or out-of-range values.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Overlays `j` on the defaults. Keys mirror the struct fields, nested by component:
/// {"tau_conf", "jobs", "output_dir", "batch_size", "manifest_seed",
///  "tracker": {"dist_threshold_by_class": {"0": 4.0, ...}, "default_dist_threshold",
///              "max_age", "min_hits_for_output"},
///  "forecast": {"min_context", "max_context", "horizon", "predictor"},
///  "enhancer": {"tau_min_iou", "tau_max_iou", "alpha", "beta", "gamma_max", "gamma_min",
///               "insertion_nms_iou", "gamma_horizon", "insert_unmatched"},
///  "eval": {"kind": "center_distance" | "bev_iou", "threshold"},
///  "simulation": {"n_scenes", "n_frames", "dt", "agents_per_scene", "bounds_half_extent",
///                 "turn_fraction", "stationary_fraction", "persistent_fraction",
///                 "min_separation", "seed",
///                 "noise": {"fn_rate", "fp_per_frame", "sigma_pos", "sigma_yaw",
///                           "sigma_extent", "sigma_vel", "tp_score_mean", "tp_score_std",
///                           "fp_score_mean", "fp_score_std"}}}
/// When "gamma_horizon" is absent it follows forecast.horizon.
PipelineConfig config_from_json(const nlohmann::json & j);
PipelineConfig load_config(const std::filesystem::path & path);
nlohmann::json config_to_json(const PipelineConfig & cfg);

}  // namespace trajlabel
