// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "trajlabel/config.hpp"
#include "trajlabel/io.hpp"

namespace trajlabel
{
namespace
{

using nlohmann::json;

TEST(PipelineConfig, DefaultsAreValid)
{
  const PipelineConfig cfg;
  EXPECT_TRUE(cfg.validate().empty());
  EXPECT_EQ(cfg.tau_conf, 0.3);
  EXPECT_EQ(cfg.forecast.min_context, 2);
  EXPECT_EQ(cfg.forecast.max_context, 4);
  EXPECT_EQ(cfg.forecast.horizon, 12);
  EXPECT_EQ(cfg.enhancer.gamma_horizon, cfg.forecast.horizon);
  EXPECT_EQ(cfg.eval.threshold, 2.0);
}

TEST(ConfigFromJson, OverlaysDefaults)
{
  const PipelineConfig cfg = config_from_json(json::parse(R"({
    "tau_conf": 0.4,
    "jobs": 3,
    "tracker": {"dist_threshold_by_class": {"1": 6.0}, "max_age": 1},
    "forecast": {"horizon": 6, "predictor": "cv"},
    "enhancer": {"beta": 0.0, "insert_unmatched": false},
    "eval": {"kind": "bev_iou"},
    "simulation": {"agents_per_scene": 5, "noise": {"fn_rate": 0.1}}
  })"));
  EXPECT_EQ(cfg.tau_conf, 0.4);
  EXPECT_EQ(cfg.jobs, 3);
  EXPECT_EQ(cfg.tracker.threshold_for(kTruck), 6.0);
  EXPECT_EQ(cfg.tracker.threshold_for(kBus), 5.5);
  EXPECT_EQ(cfg.tracker.max_age, 1);
  EXPECT_EQ(cfg.forecast.horizon, 6);
  EXPECT_EQ(cfg.enhancer.gamma_horizon, 6);
  EXPECT_EQ(cfg.forecast.predictor, PredictorKind::ConstantVelocity);
  EXPECT_EQ(cfg.enhancer.beta, 0.0);
  EXPECT_FALSE(cfg.enhancer.insert_unmatched);
  EXPECT_EQ(cfg.eval.kind, MatchCriterion::Kind::BevIou);
  EXPECT_EQ(cfg.eval.threshold, 0.5);
  EXPECT_EQ(cfg.simulation.agents_per_scene, 5);
  EXPECT_EQ(cfg.simulation.noise.fn_rate, 0.1);
  EXPECT_EQ(cfg.simulation.noise.fp_per_frame, 2.0);
}

TEST(ConfigFromJson, ExplicitGammaHorizonWins)
{
  const PipelineConfig cfg =
    config_from_json(json::parse(R"({"forecast": {"horizon": 6}, "enhancer": {"gamma_horizon": 3}})"));
  EXPECT_EQ(cfg.enhancer.gamma_horizon, 3);
}

TEST(ConfigFromJson, RejectsBadInput)
{
  EXPECT_THROW(config_from_json(json::parse(R"({"tau_cof": 0.3})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"tracker": {"gate": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"tau_conf": "high"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"jobs": 1.5})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"tau_conf": 1.5})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"forecast": {"predictor": "lstm"}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"eval": {"kind": "giou"}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"tracker": {"dist_threshold_by_class": {"car": 4}}})")),
               ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"([1, 2])")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"batch_size": 3})")), ConfigError);
}

TEST(ConfigToJson, RoundTrips)
{
  PipelineConfig cfg;
  cfg.tau_conf = 0.35;
  cfg.tracker.dist_threshold_by_class[7] = 3.25;
  cfg.enhancer.gamma_horizon = 9;
  cfg.simulation.noise.sigma_vel = 0.75;
  cfg.eval = {MatchCriterion::Kind::BevIou, 0.3};
  const json j = config_to_json(cfg);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
}

TEST(LoadConfig, FileErrors)
{
  const auto dir = std::filesystem::temp_directory_path() / "trajlabel_config_test";
  std::filesystem::create_directories(dir);
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
  {
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  {
    std::ofstream(dir / "ok.json") << R"({"enhancer": {"alpha": 2.0}})";
  }
  EXPECT_EQ(load_config(dir / "ok.json").enhancer.alpha, 2.0);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace trajlabel
