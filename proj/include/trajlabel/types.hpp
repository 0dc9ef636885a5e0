// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace trajlabel
{

using ClassId = int;
using TrackId = std::int64_t;

inline constexpr ClassId kCar = 0;
inline constexpr ClassId kTruck = 1;
inline constexpr ClassId kBus = 2;

/// Wraps an angle into (-pi, pi].
double normalize_yaw(double yaw);

/// Oriented 3D box with detector outputs. `l` runs along the heading.
struct Box3D
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;
  double yaw = 0.0;
  ClassId class_id = kCar;
  double score = 1.0;
  double vx = 0.0;
  double vy = 0.0;

  bool operator==(const Box3D &) const = default;
};

/// Builds a box with yaw wrapped into (-pi, pi]. Downstream code assumes this range.
Box3D make_box(
  double x, double y, double z, double l, double w, double h, double yaw, ClassId class_id,
  double score, double vx = 0.0, double vy = 0.0);

struct Frame
{
  std::string scene_id;
  int frame_index = 0;
  double timestamp = 0.0;
  std::vector<Box3D> boxes;

  bool operator==(const Frame &) const = default;
};

struct Scene
{
  std::string scene_id;
  double dt = 0.5;
  bool labeled = false;
  std::vector<Frame> frames;

  bool operator==(const Scene &) const = default;
};

struct TrackLink
{
  int frame_index = 0;
  Box3D box;

  bool operator==(const TrackLink &) const = default;
};

struct Track
{
  TrackId track_id = 0;
  ClassId class_id = kCar;
  std::vector<TrackLink> links;

  bool operator==(const Track &) const = default;
};

struct ForecastBox
{
  TrackId track_id = 0;
  Box3D box;

  bool operator==(const ForecastBox &) const = default;
};

/// Forecast boxes launched from one context frame, landing on one target frame.
struct ForecastSet
{
  int context_frame = 0;
  int target_frame = 0;
  std::vector<ForecastBox> boxes;

  bool operator==(const ForecastSet &) const = default;
};

enum class LabelOrigin { Teacher, Inserted };

struct WeightedLabel
{
  Box3D box;
  double weight = 1.0;
  LabelOrigin origin = LabelOrigin::Teacher;
  // Meaningful only for inserted labels.
  int context_frame = -1;

  bool operator==(const WeightedLabel &) const = default;
};

struct EnhancedFrame
{
  std::string scene_id;
  int frame_index = 0;
  std::vector<WeightedLabel> labels;
  // One entry per label; inserted labels carry 0.
  std::vector<int> match_counts;

  bool operator==(const EnhancedFrame &) const = default;
};

/// Integer class ids with display names. Unknown ids are allowed.
class ClassRegistry
{
public:
  ClassRegistry();

  void set(ClassId id, std::string name);
  std::string name(ClassId id) const;
  const std::map<ClassId, std::string> & entries() const { return names_; }

private:
  std::map<ClassId, std::string> names_;
};

/// Describes every broken invariant; empty when the scene is well formed.
std::vector<std::string> validate_scene(const Scene & scene);

/// Violations for a single box, prefixed by `where`.
void validate_box(const Box3D & box, const std::string & where, std::vector<std::string> & out);

/// Keeps boxes with score >= tau_conf in their original order.
Frame confidence_filter(const Frame & frame, double tau_conf);

}  // namespace trajlabel
