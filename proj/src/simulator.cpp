// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "trajlabel/random.hpp"

namespace trajlabel
{

namespace
{

enum StreamPurpose : std::uint32_t {
  kPurposeCorruptTrue = 1,
  kPurposeCorruptFalse = 2,
  kPurposePopulation = 3,
};

constexpr std::uint32_t kSceneLevelFrame = 0xFFFFFFFFu;

struct ClassShape
{
  double l, w, h, max_speed;
};

ClassShape class_shape(ClassId cls)
{
  switch (cls) {
    case kTruck:
      return {7.0, 2.5, 3.0, 10.0};
    case kBus:
      return {11.0, 2.9, 3.5, 8.0};
    default:
      return {4.6, 1.9, 1.7, 12.0};
  }
}

ClassId draw_class(CounterRng & rng)
{
  const double u = rng.uniform();
  if (u < 0.6) {
    return kCar;
  }
  return u < 0.85 ? kTruck : kBus;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

Box3D agent_box_at(const AgentSpec & agent, double elapsed)
{
  double x = agent.x0;
  double y = agent.y0;
  double heading = agent.heading;
  double speed = 0.0;
  if (const auto * cv = std::get_if<ConstantVelocity>(&agent.motion)) {
    speed = cv->speed;
    x += speed * std::cos(heading) * elapsed;
    y += speed * std::sin(heading) * elapsed;
  } else {
    const auto & ct = std::get<ConstantTurn>(agent.motion);
    speed = ct.speed;
    if (ct.turn_rate == 0.0) {
      x += speed * std::cos(heading) * elapsed;
      y += speed * std::sin(heading) * elapsed;
    } else {
      const double radius = speed / ct.turn_rate;
      const double th = agent.heading + ct.turn_rate * elapsed;
      x += radius * (std::sin(th) - std::sin(agent.heading));
      y -= radius * (std::cos(th) - std::cos(agent.heading));
      heading = th;
    }
  }
  return make_box(
    x, y, 0.5 * agent.h, agent.l, agent.w, agent.h, heading, agent.class_id, 1.0,
    speed * std::cos(heading), speed * std::sin(heading));
}

std::vector<std::string> NoiseModel::validate() const
{
  std::vector<std::string> out;
  if (!(fn_rate >= 0.0 && fn_rate <= 1.0)) {
    out.push_back("noise: fn_rate must lie in [0, 1]");
  }
  if (!(fp_per_frame >= 0.0)) {
    out.push_back("noise: fp_per_frame must be >= 0");
  }
  for (double s : {sigma_pos, sigma_yaw, sigma_extent, sigma_vel, score_model.tp_std,
                   score_model.fp_std}) {
    if (!(s >= 0.0)) {
      out.push_back("noise: standard deviations must be >= 0");
      break;
    }
  }
  if (!(bounds_half_extent > 0.0)) {
    out.push_back("noise: bounds_half_extent must be > 0");
  }
  return out;
}

LabeledScene generate_scene(
  const std::vector<AgentSpec> & agents, int n_frames, double dt, const std::string & scene_id)
{
  LabeledScene out;
  out.scene.scene_id = scene_id;
  out.scene.dt = dt;
  out.scene.frames.resize(static_cast<std::size_t>(std::max(n_frames, 0)));
  out.agent_ids.resize(out.scene.frames.size());
  for (int f = 0; f < n_frames; ++f) {
    Frame & frame = out.scene.frames[static_cast<std::size_t>(f)];
    frame.scene_id = scene_id;
    frame.frame_index = f;
    frame.timestamp = f * dt;
    for (const AgentSpec & a : agents) {
      if (f < a.spawn_frame || f >= a.despawn_frame) {
        continue;
      }
      frame.boxes.push_back(agent_box_at(a, (f - a.spawn_frame) * dt));
      out.agent_ids[static_cast<std::size_t>(f)].push_back(a.agent_id);
    }
  }
  return out;
}

LabeledScene corrupt(const LabeledScene & gt, const NoiseModel & noise)
{
  LabeledScene out;
  out.scene.scene_id = gt.scene.scene_id;
  out.scene.dt = gt.scene.dt;
  out.scene.labeled = false;
  const std::uint32_t scene_stream = stream_hash(gt.scene.scene_id);
  const double half = noise.bounds_half_extent;
  const ScoreModel & sm = noise.score_model;

  for (std::size_t fi = 0; fi < gt.scene.frames.size(); ++fi) {
    const Frame & src = gt.scene.frames[fi];
    Frame frame;
    frame.scene_id = src.scene_id;
    frame.frame_index = src.frame_index;
    frame.timestamp = src.timestamp;
    std::vector<int> ids;
    const auto frame_stream = static_cast<std::uint32_t>(src.frame_index);

    CounterRng tp_rng(noise.seed, {scene_stream, frame_stream, kPurposeCorruptTrue});
    for (std::size_t b = 0; b < src.boxes.size(); ++b) {
      const Box3D & g = src.boxes[b];
      const bool dropped = tp_rng.uniform() < noise.fn_rate;
      Box3D box = g;
      box.x += tp_rng.normal(0.0, noise.sigma_pos);
      box.y += tp_rng.normal(0.0, noise.sigma_pos);
      box.z += tp_rng.normal(0.0, noise.sigma_pos);
      box.l = std::max(0.1 * g.l, g.l + tp_rng.normal(0.0, noise.sigma_extent));
      box.w = std::max(0.1 * g.w, g.w + tp_rng.normal(0.0, noise.sigma_extent));
      box.h = std::max(0.1 * g.h, g.h + tp_rng.normal(0.0, noise.sigma_extent));
      box.yaw = normalize_yaw(g.yaw + tp_rng.normal(0.0, noise.sigma_yaw));
      box.vx += tp_rng.normal(0.0, noise.sigma_vel);
      box.vy += tp_rng.normal(0.0, noise.sigma_vel);
      box.score = clip01(tp_rng.normal(sm.tp_mean, sm.tp_std));
      if (dropped) {
        continue;
      }
      frame.boxes.push_back(box);
      ids.push_back(gt.agent_ids.empty() ? -1 : gt.agent_ids[fi][b]);
    }

    CounterRng fp_rng(noise.seed, {scene_stream, frame_stream, kPurposeCorruptFalse});
    const int n_fp = fp_rng.poisson(noise.fp_per_frame);
    for (int k = 0; k < n_fp; ++k) {
      const ClassId cls = draw_class(fp_rng);
      const ClassShape shape = class_shape(cls);
      const double x = fp_rng.uniform(-half, half);
      const double y = fp_rng.uniform(-half, half);
      const double yaw = fp_rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double vx = fp_rng.normal(0.0, 2.0);
      const double vy = fp_rng.normal(0.0, 2.0);
      const double score = clip01(fp_rng.normal(sm.fp_mean, sm.fp_std));
      frame.boxes.push_back(
        make_box(x, y, 0.5 * shape.h, shape.l, shape.w, shape.h, yaw, cls, score, vx, vy));
      ids.push_back(-1);
    }
    out.scene.frames.push_back(std::move(frame));
    out.agent_ids.push_back(std::move(ids));
  }
  return out;
}

std::vector<std::string> SimulationConfig::validate() const
{
  std::vector<std::string> out = noise.validate();
  if (n_scenes < 0) {
    out.push_back("simulation: n_scenes must be >= 0");
  }
  if (n_frames < 1) {
    out.push_back("simulation: n_frames must be >= 1");
  }
  if (!(dt > 0.0)) {
    out.push_back("simulation: dt must be > 0");
  }
  if (agents_per_scene < 0) {
    out.push_back("simulation: agents_per_scene must be >= 0");
  }
  for (double p : {turn_fraction, stationary_fraction, persistent_fraction}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      out.push_back("simulation: fractions must lie in [0, 1]");
      break;
    }
  }
  if (!(bounds_half_extent > 0.0)) {
    out.push_back("simulation: bounds_half_extent must be > 0");
  }
  return out;
}

std::string scene_name(int scene_index)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene-%04d", scene_index);
  return buf;
}

std::vector<AgentSpec> random_agents(const SimulationConfig & cfg, int scene_index)
{
  CounterRng rng(
    cfg.seed, {static_cast<std::uint32_t>(scene_index), kSceneLevelFrame, kPurposePopulation});
  const double half = 0.8 * cfg.bounds_half_extent;
  const int n = cfg.n_frames;
  std::vector<AgentSpec> agents;

  auto draw = [&](int id) {
    AgentSpec a;
    a.agent_id = id;
    a.class_id = draw_class(rng);
    const ClassShape shape = class_shape(a.class_id);
    a.l = shape.l * rng.uniform(0.9, 1.1);
    a.w = shape.w * rng.uniform(0.9, 1.1);
    a.h = shape.h * rng.uniform(0.9, 1.1);
    a.x0 = rng.uniform(-half, half);
    a.y0 = rng.uniform(-half, half);
    a.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const bool stationary = rng.uniform() < cfg.stationary_fraction;
    const double speed = stationary ? 0.0 : rng.uniform(2.0, shape.max_speed);
    if (!stationary && rng.uniform() < cfg.turn_fraction) {
      const double rate = rng.uniform(0.05, 0.3);
      a.motion = ConstantTurn{speed, rng.uniform() < 0.5 ? rate : -rate};
    } else {
      a.motion = ConstantVelocity{speed};
    }
    if (rng.uniform() < cfg.persistent_fraction || n < 8) {
      a.spawn_frame = 0;
      a.despawn_frame = n;
    } else {
      a.spawn_frame = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(n / 2, 1))));
      const int duration = 8 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 7)));
      a.despawn_frame = std::min(n, a.spawn_frame + duration);
    }
    return a;
  };

  // Checked over the union of both lifetimes, each trajectory extended along its motion, so
  // an agent never appears where another just left (or is about to arrive).
  auto far_enough = [&](const AgentSpec & cand) {
    for (const AgentSpec & other : agents) {
      const int from = std::min(cand.spawn_frame, other.spawn_frame);
      const int to = std::max(cand.despawn_frame, other.despawn_frame);
      for (int f = from; f < to; ++f) {
        const Box3D a = agent_box_at(cand, (f - cand.spawn_frame) * cfg.dt);
        const Box3D b = agent_box_at(other, (f - other.spawn_frame) * cfg.dt);
        if (std::hypot(a.x - b.x, a.y - b.y) <= cfg.min_separation) {
          return false;
        }
      }
    }
    return true;
  };

  for (int id = 0; id < cfg.agents_per_scene; ++id) {
    if (cfg.min_separation <= 0.0) {
      agents.push_back(draw(id));
      continue;
    }
    for (int attempt = 0; attempt < 200; ++attempt) {
      AgentSpec cand = draw(id);
      if (far_enough(cand)) {
        agents.push_back(cand);
        break;
      }
    }
  }
  return agents;
}

SimulatedScene simulate_scene(const SimulationConfig & cfg, int scene_index)
{
  SimulatedScene out;
  out.truth = generate_scene(random_agents(cfg, scene_index), cfg.n_frames, cfg.dt,
                             scene_name(scene_index));
  NoiseModel noise = cfg.noise;
  noise.seed = cfg.seed;
  out.teacher = corrupt(out.truth, noise);
  return out;
}

}  // namespace trajlabel
