// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "trajlabel/geometry.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel
{

struct TrackerConfig
{
  // Association gate on center distance, meters, per class.
  std::map<ClassId, double> dist_threshold_by_class{{kCar, 4.0}, {kTruck, 4.0}, {kBus, 5.5}};
  // Gate for classes absent from the map.
  double default_dist_threshold = 4.0;
  // Frames a track may go unmatched before it is retired.
  int max_age = 2;
  // Tracks with fewer links are dropped from build_tracks output.
  int min_hits_for_output = 1;

  double threshold_for(ClassId cls) const;
  std::vector<std::string> validate() const;
};

/// A live track plus the number of consecutive frames it has gone unmatched.
struct TrackState
{
  Track track;
  int frames_since_update = 0;
};

struct Association
{
  std::vector<std::pair<TrackId, std::size_t>> matches;
  std::vector<std::size_t> births;
  std::vector<TrackId> deaths;
};

/// Last center displaced by the last box's reported velocity over `dt` seconds.
Vec2 predict_center(const Track & track, double dt);

/// Greedy, class-aware nearest-center association. Each track is extrapolated over
/// `dt * (frames_since_update + 1)` before distances are measured.
Association greedy_associate(
  std::span<const TrackState> active_tracks, std::span<const Box3D> detections,
  const TrackerConfig & cfg, double dt);

/// Confidence-filters every frame, then links detections into tracks. Output is sorted by id.
std::vector<Track> build_tracks(const Scene & scene, double tau_conf, const TrackerConfig & cfg);

}  // namespace trajlabel
