// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/config.hpp"

#include <fstream>
#include <set>

#include "trajlabel/io.hpp"

namespace trajlabel
{

using nlohmann::json;

namespace
{

// Reads keys out of one JSON object and rejects any it was not asked about.
class Section
{
public:
  Section(const json & j, std::string name) : j_(j), name_(std::move(name))
  {
    if (!j_.is_object()) {
      throw ConfigError("config: '" + name_ + "' must be an object");
    }
  }

  template <class T>
  void read(const char * key, T & out)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) {
      return;
    }
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) {
          throw ConfigError("");
        }
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) {
          throw ConfigError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) {
          throw ConfigError("");
        }
      } else {
        if (!it->is_string()) {
          throw ConfigError("");
        }
      }
      out = it->get<T>();
    } catch (const std::exception &) {
      throw ConfigError("config: '" + name_ + "." + key + "' has the wrong type");
    }
  }

  bool has(const char * key) const { return j_.contains(key); }

  const json * child(const char * key)
  {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const
  {
    for (const auto & [k, v] : j_.items()) {
      if (!seen_.count(k)) {
        throw ConfigError("config: unknown key '" + name_ + "." + k + "'");
      }
    }
  }

private:
  const json & j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

std::vector<std::string> PipelineConfig::validate() const
{
  std::vector<std::string> out;
  if (!(tau_conf >= 0.0 && tau_conf <= 1.0)) {
    out.push_back("tau_conf must lie in [0, 1]");
  }
  if (jobs < 1) {
    out.push_back("jobs must be >= 1");
  }
  if (batch_size < 2 || batch_size % 2 != 0) {
    out.push_back("batch_size must be a positive even number");
  }
  for (auto part : {tracker.validate(), forecast.validate(), enhancer.validate(), eval.validate(),
                    simulation.validate()}) {
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

PipelineConfig config_from_json(const json & j)
{
  PipelineConfig cfg;
  Section root(j, "config");
  root.read("tau_conf", cfg.tau_conf);
  root.read("jobs", cfg.jobs);
  std::string out_dir = cfg.output_dir.string();
  root.read("output_dir", out_dir);
  cfg.output_dir = out_dir;
  root.read("batch_size", cfg.batch_size);
  root.read("manifest_seed", cfg.manifest_seed);

  if (const json * t = root.child("tracker")) {
    Section s(*t, "tracker");
    if (const json * m = s.child("dist_threshold_by_class")) {
      if (!m->is_object()) {
        throw ConfigError("config: 'tracker.dist_threshold_by_class' must be an object");
      }
      for (const auto & [k, v] : m->items()) {
        if (!v.is_number()) {
          throw ConfigError("config: class thresholds must be numbers");
        }
        try {
          cfg.tracker.dist_threshold_by_class[std::stoi(k)] = v.get<double>();
        } catch (const std::logic_error &) {
          throw ConfigError("config: class id '" + k + "' is not an integer");
        }
      }
    }
    s.read("default_dist_threshold", cfg.tracker.default_dist_threshold);
    s.read("max_age", cfg.tracker.max_age);
    s.read("min_hits_for_output", cfg.tracker.min_hits_for_output);
    s.finish();
  }

  if (const json * f = root.child("forecast")) {
    Section s(*f, "forecast");
    s.read("min_context", cfg.forecast.min_context);
    s.read("max_context", cfg.forecast.max_context);
    s.read("horizon", cfg.forecast.horizon);
    std::string pred = to_string(cfg.forecast.predictor);
    s.read("predictor", pred);
    try {
      cfg.forecast.predictor = parse_predictor_kind(pred);
    } catch (const std::invalid_argument & e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    s.finish();
  }

  bool gamma_horizon_set = false;
  if (const json * e = root.child("enhancer")) {
    Section s(*e, "enhancer");
    s.read("tau_min_iou", cfg.enhancer.tau_min_iou);
    s.read("tau_max_iou", cfg.enhancer.tau_max_iou);
    s.read("alpha", cfg.enhancer.alpha);
    s.read("beta", cfg.enhancer.beta);
    s.read("gamma_max", cfg.enhancer.gamma_max);
    s.read("gamma_min", cfg.enhancer.gamma_min);
    s.read("insertion_nms_iou", cfg.enhancer.insertion_nms_iou);
    gamma_horizon_set = s.has("gamma_horizon");
    s.read("gamma_horizon", cfg.enhancer.gamma_horizon);
    s.read("insert_unmatched", cfg.enhancer.insert_unmatched);
    s.finish();
  }
  if (!gamma_horizon_set) {
    cfg.enhancer.gamma_horizon = cfg.forecast.horizon;
  }

  if (const json * e = root.child("eval")) {
    Section s(*e, "eval");
    std::string kind = "center_distance";
    s.read("kind", kind);
    if (kind == "center_distance") {
      cfg.eval.kind = MatchCriterion::Kind::CenterDistance;
    } else if (kind == "bev_iou") {
      cfg.eval.kind = MatchCriterion::Kind::BevIou;
      if (!s.has("threshold")) {
        cfg.eval.threshold = 0.5;
      }
    } else {
      throw ConfigError("config: eval.kind must be 'center_distance' or 'bev_iou'");
    }
    s.read("threshold", cfg.eval.threshold);
    s.finish();
  }

  if (const json * sim = root.child("simulation")) {
    Section s(*sim, "simulation");
    SimulationConfig & sc = cfg.simulation;
    s.read("n_scenes", sc.n_scenes);
    s.read("n_frames", sc.n_frames);
    s.read("dt", sc.dt);
    s.read("agents_per_scene", sc.agents_per_scene);
    s.read("bounds_half_extent", sc.bounds_half_extent);
    s.read("turn_fraction", sc.turn_fraction);
    s.read("stationary_fraction", sc.stationary_fraction);
    s.read("persistent_fraction", sc.persistent_fraction);
    s.read("min_separation", sc.min_separation);
    s.read("seed", sc.seed);
    if (const json * n = s.child("noise")) {
      Section ns(*n, "simulation.noise");
      ns.read("fn_rate", sc.noise.fn_rate);
      ns.read("fp_per_frame", sc.noise.fp_per_frame);
      ns.read("sigma_pos", sc.noise.sigma_pos);
      ns.read("sigma_yaw", sc.noise.sigma_yaw);
      ns.read("sigma_extent", sc.noise.sigma_extent);
      ns.read("sigma_vel", sc.noise.sigma_vel);
      ns.read("tp_score_mean", sc.noise.score_model.tp_mean);
      ns.read("tp_score_std", sc.noise.score_model.tp_std);
      ns.read("fp_score_mean", sc.noise.score_model.fp_mean);
      ns.read("fp_score_std", sc.noise.score_model.fp_std);
      ns.finish();
    }
    sc.noise.bounds_half_extent = sc.bounds_half_extent;
    s.finish();
  }
  root.finish();

  const auto problems = cfg.validate();
  if (!problems.empty()) {
    throw ConfigError("config: " + problems.front());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config '" + path.string() + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const PipelineConfig & cfg)
{
  json thresholds = json::object();
  for (const auto & [cls, thr] : cfg.tracker.dist_threshold_by_class) {
    thresholds[std::to_string(cls)] = thr;
  }
  const SimulationConfig & sc = cfg.simulation;
  return json{
    {"tau_conf", cfg.tau_conf},
    {"jobs", cfg.jobs},
    {"output_dir", cfg.output_dir.string()},
    {"batch_size", cfg.batch_size},
    {"manifest_seed", cfg.manifest_seed},
    {"tracker",
     {{"dist_threshold_by_class", thresholds},
      {"default_dist_threshold", cfg.tracker.default_dist_threshold},
      {"max_age", cfg.tracker.max_age},
      {"min_hits_for_output", cfg.tracker.min_hits_for_output}}},
    {"forecast",
     {{"min_context", cfg.forecast.min_context},
      {"max_context", cfg.forecast.max_context},
      {"horizon", cfg.forecast.horizon},
      {"predictor", to_string(cfg.forecast.predictor)}}},
    {"enhancer",
     {{"tau_min_iou", cfg.enhancer.tau_min_iou},
      {"tau_max_iou", cfg.enhancer.tau_max_iou},
      {"alpha", cfg.enhancer.alpha},
      {"beta", cfg.enhancer.beta},
      {"gamma_max", cfg.enhancer.gamma_max},
      {"gamma_min", cfg.enhancer.gamma_min},
      {"insertion_nms_iou", cfg.enhancer.insertion_nms_iou},
      {"gamma_horizon", cfg.enhancer.gamma_horizon},
      {"insert_unmatched", cfg.enhancer.insert_unmatched}}},
    {"eval",
     {{"kind", cfg.eval.kind == MatchCriterion::Kind::CenterDistance ? "center_distance" : "bev_iou"},
      {"threshold", cfg.eval.threshold}}},
    {"simulation",
     {{"n_scenes", sc.n_scenes},
      {"n_frames", sc.n_frames},
      {"dt", sc.dt},
      {"agents_per_scene", sc.agents_per_scene},
      {"bounds_half_extent", sc.bounds_half_extent},
      {"turn_fraction", sc.turn_fraction},
      {"stationary_fraction", sc.stationary_fraction},
      {"persistent_fraction", sc.persistent_fraction},
      {"min_separation", sc.min_separation},
      {"seed", sc.seed},
      {"noise",
       {{"fn_rate", sc.noise.fn_rate},
        {"fp_per_frame", sc.noise.fp_per_frame},
        {"sigma_pos", sc.noise.sigma_pos},
        {"sigma_yaw", sc.noise.sigma_yaw},
        {"sigma_extent", sc.noise.sigma_extent},
        {"sigma_vel", sc.noise.sigma_vel},
        {"tp_score_mean", sc.noise.score_model.tp_mean},
        {"tp_score_std", sc.noise.score_model.tp_std},
        {"fp_score_mean", sc.noise.score_model.fp_mean},
        {"fp_score_std", sc.noise.score_model.fp_std}}}}}};
}

}  // namespace trajlabel
