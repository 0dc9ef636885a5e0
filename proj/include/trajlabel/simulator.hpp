// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "trajlabel/types.hpp"

namespace trajlabel
{

struct ConstantVelocity
{
  double speed = 0.0;
};

struct ConstantTurn
{
  double speed = 0.0;
  double turn_rate = 0.0;  // rad/s, positive = counter-clockwise
};

using AgentMotion = std::variant<ConstantVelocity, ConstantTurn>;

struct AgentSpec
{
  int agent_id = 0;
  ClassId class_id = kCar;
  AgentMotion motion = ConstantVelocity{};
  double heading = 0.0;  // at spawn
  int spawn_frame = 0;
  int despawn_frame = 1;  // exclusive
  double l = 4.6;
  double w = 1.9;
  double h = 1.7;
  double x0 = 0.0;  // position at spawn
  double y0 = 0.0;
};

/// Exact box of `agent` `elapsed` seconds after it spawned. Score 1, true velocity.
Box3D agent_box_at(const AgentSpec & agent, double elapsed);

struct ScoreModel
{
  double tp_mean = 0.7;
  double tp_std = 0.15;
  double fp_mean = 0.4;
  double fp_std = 0.15;
};

struct NoiseModel
{
  double fn_rate = 0.25;
  double fp_per_frame = 2.0;
  double sigma_pos = 0.3;
  double sigma_yaw = 0.05;
  double sigma_extent = 0.1;
  double sigma_vel = 0.5;
  ScoreModel score_model;
  // False positives are placed uniformly in [-half, half]^2.
  double bounds_half_extent = 100.0;
  // simulate_scene replaces this with SimulationConfig::seed.
  std::uint64_t seed = 42;

  std::vector<std::string> validate() const;
};

/// A ground-truth or teacher scene plus, per frame and box, the source agent id
/// (-1 marks a false positive).
struct LabeledScene
{
  Scene scene;
  std::vector<std::vector<int>> agent_ids;
};

LabeledScene generate_scene(
  const std::vector<AgentSpec> & agents, int n_frames, double dt, const std::string & scene_id);

/// Teacher pseudo-labels drawn from `gt`. Every box draws its perturbations even when it is
/// dropped, so fn_rate changes which boxes survive but not how survivors are perturbed.
LabeledScene corrupt(const LabeledScene & gt, const NoiseModel & noise);

struct SimulationConfig
{
  int n_scenes = 50;
  int n_frames = 40;
  double dt = 0.5;
  int agents_per_scene = 12;
  double bounds_half_extent = 100.0;
  double turn_fraction = 0.3;
  double stationary_fraction = 0.15;
  // Fraction of agents present for the whole scene; others enter or leave mid-scene.
  double persistent_fraction = 0.5;
  // When > 0, agents are resampled (up to 200 tries each, then dropped) until every pair
  // stays this far apart at every frame of either lifetime, trajectories extrapolated.
  double min_separation = 0.0;
  NoiseModel noise;
  std::uint64_t seed = 42;

  std::vector<std::string> validate() const;
};

std::string scene_name(int scene_index);

/// Random agent population for one scene, from the stream (seed, scene_index).
std::vector<AgentSpec> random_agents(const SimulationConfig & cfg, int scene_index);

struct SimulatedScene
{
  LabeledScene truth;
  LabeledScene teacher;
};

SimulatedScene simulate_scene(const SimulationConfig & cfg, int scene_index);

}  // namespace trajlabel
