// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace trajlabel
{

double TrackerConfig::threshold_for(ClassId cls) const
{
  auto it = dist_threshold_by_class.find(cls);
  return it != dist_threshold_by_class.end() ? it->second : default_dist_threshold;
}

std::vector<std::string> TrackerConfig::validate() const
{
  std::vector<std::string> out;
  for (const auto & [cls, thr] : dist_threshold_by_class) {
    if (!(thr > 0.0)) {
      out.push_back("tracker: distance threshold for class " + std::to_string(cls) +
                    " must be > 0");
    }
  }
  if (!(default_dist_threshold > 0.0)) {
    out.push_back("tracker: default distance threshold must be > 0");
  }
  if (max_age < 0) {
    out.push_back("tracker: max_age must be >= 0");
  }
  if (min_hits_for_output < 1) {
    out.push_back("tracker: min_hits_for_output must be >= 1");
  }
  return out;
}

Vec2 predict_center(const Track & track, double dt)
{
  const Box3D & last = track.links.back().box;
  return {last.x + last.vx * dt, last.y + last.vy * dt};
}

Association greedy_associate(
  std::span<const TrackState> active_tracks, std::span<const Box3D> detections,
  const TrackerConfig & cfg, double dt)
{
  struct Candidate
  {
    double dist;
    std::size_t det;
    TrackId track_id;
    std::size_t track_pos;
  };

  std::vector<Vec2> predicted;
  predicted.reserve(active_tracks.size());
  for (const TrackState & ts : active_tracks) {
    predicted.push_back(predict_center(ts.track, dt * (ts.frames_since_update + 1)));
  }

  std::vector<Candidate> candidates;
  for (std::size_t t = 0; t < active_tracks.size(); ++t) {
    const Track & track = active_tracks[t].track;
    const double gate = cfg.threshold_for(track.class_id);
    for (std::size_t d = 0; d < detections.size(); ++d) {
      const Box3D & det = detections[d];
      if (det.class_id != track.class_id) {
        continue;
      }
      const double dist = std::hypot(det.x - predicted[t].x, det.y - predicted[t].y);
      if (dist <= gate) {
        candidates.push_back({dist, d, track.track_id, t});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate & a, const Candidate & b) {
    return std::tie(a.dist, a.det, a.track_id) < std::tie(b.dist, b.det, b.track_id);
  });

  Association out;
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> track_used(active_tracks.size(), false);
  for (const Candidate & c : candidates) {
    if (det_used[c.det] || track_used[c.track_pos]) {
      continue;
    }
    det_used[c.det] = true;
    track_used[c.track_pos] = true;
    out.matches.emplace_back(c.track_id, c.det);
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (!det_used[d]) {
      out.births.push_back(d);
    }
  }
  for (std::size_t t = 0; t < active_tracks.size(); ++t) {
    if (!track_used[t] && active_tracks[t].frames_since_update + 1 > cfg.max_age) {
      out.deaths.push_back(active_tracks[t].track.track_id);
    }
  }
  std::sort(out.deaths.begin(), out.deaths.end());
  return out;
}

std::vector<Track> build_tracks(const Scene & scene, double tau_conf, const TrackerConfig & cfg)
{
  std::vector<TrackState> active;
  std::vector<Track> finished;
  TrackId next_id = 0;

  for (const Frame & raw : scene.frames) {
    const Frame frame = confidence_filter(raw, tau_conf);
    const Association assoc = greedy_associate(active, frame.boxes, cfg, scene.dt);

    std::vector<bool> matched(active.size(), false);
    for (const auto & [track_id, det] : assoc.matches) {
      // active is kept sorted by track id
      auto it = std::lower_bound(
        active.begin(), active.end(), track_id,
        [](const TrackState & ts, TrackId id) { return ts.track.track_id < id; });
      it->track.links.push_back({frame.frame_index, frame.boxes[det]});
      it->frames_since_update = 0;
      matched[static_cast<std::size_t>(it - active.begin())] = true;
    }
    std::vector<TrackState> survivors;
    survivors.reserve(active.size() + assoc.births.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (!matched[i]) {
        if (std::binary_search(assoc.deaths.begin(), assoc.deaths.end(), active[i].track.track_id)) {
          finished.push_back(std::move(active[i].track));
          continue;
        }
        active[i].frames_since_update += 1;
      }
      survivors.push_back(std::move(active[i]));
    }
    for (std::size_t det : assoc.births) {
      TrackState ts;
      ts.track.track_id = next_id++;
      ts.track.class_id = frame.boxes[det].class_id;
      ts.track.links.push_back({frame.frame_index, frame.boxes[det]});
      survivors.push_back(std::move(ts));
    }
    active = std::move(survivors);
  }
  for (TrackState & ts : active) {
    finished.push_back(std::move(ts.track));
  }

  std::vector<Track> out;
  out.reserve(finished.size());
  for (Track & t : finished) {
    if (static_cast<int>(t.links.size()) >= cfg.min_hits_for_output) {
      out.push_back(std::move(t));
    }
  }
  std::sort(out.begin(), out.end(), [](const Track & a, const Track & b) {
    return a.track_id < b.track_id;
  });
  return out;
}

}  // namespace trajlabel
