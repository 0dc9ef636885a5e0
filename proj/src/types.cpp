// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/types.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace trajlabel
{

double normalize_yaw(double yaw)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(yaw, two_pi);
  if (r <= -std::numbers::pi) {
    r += two_pi;
  }
  return r;
}

Box3D make_box(
  double x, double y, double z, double l, double w, double h, double yaw, ClassId class_id,
  double score, double vx, double vy)
{
  return Box3D{x, y, z, l, w, h, normalize_yaw(yaw), class_id, score, vx, vy};
}

ClassRegistry::ClassRegistry()
: names_{{kCar, "car"}, {kTruck, "truck"}, {kBus, "bus"}}
{
}

void ClassRegistry::set(ClassId id, std::string name) { names_[id] = std::move(name); }

std::string ClassRegistry::name(ClassId id) const
{
  auto it = names_.find(id);
  if (it != names_.end()) {
    return it->second;
  }
  return "class_" + std::to_string(id);
}

void validate_box(const Box3D & box, const std::string & where, std::vector<std::string> & out)
{
  const double fields[] = {box.x, box.y, box.z, box.l, box.w, box.h, box.yaw, box.score, box.vx,
                           box.vy};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      out.push_back(where + ": non-finite field");
      return;
    }
  }
  if (!(box.l > 0.0 && box.w > 0.0 && box.h > 0.0)) {
    out.push_back(where + ": extent must be positive (l, w, h > 0)");
  }
  if (box.score < 0.0 || box.score > 1.0) {
    out.push_back(where + ": score outside [0, 1]");
  }
  if (!(box.yaw > -std::numbers::pi && box.yaw <= std::numbers::pi)) {
    out.push_back(where + ": yaw not normalized to (-pi, pi]");
  }
  if (box.class_id < 0) {
    out.push_back(where + ": negative class_id");
  }
}

std::vector<std::string> validate_scene(const Scene & scene)
{
  std::vector<std::string> out;
  const std::string prefix = "scene '" + scene.scene_id + "'";
  if (!(scene.dt > 0.0) || !std::isfinite(scene.dt)) {
    out.push_back(prefix + ": dt must be positive");
  }
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const Frame & f = scene.frames[i];
    std::ostringstream where;
    where << prefix << " frame " << f.frame_index;
    if (f.frame_index < 0) {
      out.push_back(where.str() + ": negative frame_index");
    }
    if (!std::isfinite(f.timestamp)) {
      out.push_back(where.str() + ": non-finite timestamp");
    }
    if (i > 0) {
      const Frame & prev = scene.frames[i - 1];
      if (f.frame_index <= prev.frame_index) {
        out.push_back(where.str() + ": frame_index not strictly increasing (must be unique)");
      }
      if (!(f.timestamp > prev.timestamp)) {
        out.push_back(where.str() + ": timestamp not strictly increasing");
      } else if (std::abs((f.timestamp - prev.timestamp) - scene.dt) > 1e-9) {
        out.push_back(where.str() + ": frame spacing differs from dt");
      }
    }
    for (std::size_t b = 0; b < f.boxes.size(); ++b) {
      validate_box(f.boxes[b], where.str() + " box " + std::to_string(b), out);
    }
  }
  return out;
}

Frame confidence_filter(const Frame & frame, double tau_conf)
{
  Frame out;
  out.scene_id = frame.scene_id;
  out.frame_index = frame.frame_index;
  out.timestamp = frame.timestamp;
  out.boxes.reserve(frame.boxes.size());
  for (const Box3D & b : frame.boxes) {
    if (b.score >= tau_conf) {
      out.boxes.push_back(b);
    }
  }
  return out;
}

}  // namespace trajlabel
