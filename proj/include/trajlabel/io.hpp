// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajlabel/simulator.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel
{

inline constexpr int kFormatVersion = 1;

/// Malformed content. Carries the 1-based line number when known.
class FormatError : public std::runtime_error
{
public:
  FormatError(const std::string & what, std::size_t line);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Incremental SHA-256 over written or read bytes.
class ContentDigest
{
public:
  ContentDigest();
  ~ContentDigest();
  ContentDigest(const ContentDigest &) = delete;
  ContentDigest & operator=(const ContentDigest &) = delete;

  void update(const std::string & bytes);
  /// "sha256:<hex>" of everything so far.
  std::string hex() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Line-at-a-time JSON writer. finish() appends {"digest": ...} covering all prior bytes.
class JsonlWriter
{
public:
  explicit JsonlWriter(const std::filesystem::path & path);
  ~JsonlWriter();

  void write(const nlohmann::json & record);
  /// Writes the digest line and closes the file; returns the digest.
  std::string finish();

private:
  std::filesystem::path path_;
  std::ofstream out_;
  ContentDigest digest_;
  bool finished_ = false;
};

/// Line-at-a-time JSON reader. A trailing digest line, when present, is verified.
class JsonlReader
{
public:
  explicit JsonlReader(const std::filesystem::path & path);

  /// Next record, or nullopt at end of data. Throws FormatError on bad JSON or a digest
  /// mismatch.
  std::optional<nlohmann::json> next();
  /// Returns the next record without consuming it.
  const std::optional<nlohmann::json> & peek();
  std::size_t line() const { return line_; }
  std::size_t last_line() const { return record_line_; }
  bool digest_verified() const { return digest_verified_; }
  const std::filesystem::path & path() const { return path_; }

private:
  std::optional<nlohmann::json> read_record();

  std::filesystem::path path_;
  std::ifstream in_;
  ContentDigest digest_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
  std::size_t peeked_line_ = 0;
  bool digest_verified_ = false;
  bool done_ = false;
  bool has_peek_ = false;
  std::optional<nlohmann::json> peeked_;
};

/// Reads the digest line of a finished file without parsing the rest.
std::string read_file_digest(const std::filesystem::path & path);

nlohmann::json box_to_json(const Box3D & box);
Box3D box_from_json(const nlohmann::json & j, std::size_t line);

// Scene files: a header {scene_id, dt, labeled, n_frames, format_version} followed by
// n_frames frame records {frame_index, timestamp, boxes}. Several scenes may follow each other.
void write_scene(JsonlWriter & out, const Scene & scene);
/// Next scene, or nullopt at end of file. The scene is checked with validate_scene.
std::optional<Scene> read_scene(JsonlReader & in);
std::vector<Scene> read_all_scenes(const std::filesystem::path & path);

// Per-scene blocks: a header {kind, scene_id, n_records, format_version} followed by records.
void write_tracks(JsonlWriter & out, const std::string & scene_id, std::span<const Track> tracks);
struct TrackBlock
{
  std::string scene_id;
  std::vector<Track> tracks;
};
std::optional<TrackBlock> read_tracks(JsonlReader & in);

void write_forecasts(
  JsonlWriter & out, const std::string & scene_id, std::span<const ForecastSet> sets);
struct ForecastBlock
{
  // Empty when read from a headerless file of bare ForecastSet lines.
  std::string scene_id;
  std::vector<ForecastSet> sets;
};
/// Also accepts a headerless file made only of ForecastSet lines, returned as one block.
std::optional<ForecastBlock> read_forecasts(JsonlReader & in);

void write_enhanced(
  JsonlWriter & out, const std::string & scene_id, std::span<const EnhancedFrame> frames);
struct EnhancedBlock
{
  std::string scene_id;
  std::vector<EnhancedFrame> frames;
};
std::optional<EnhancedBlock> read_enhanced(JsonlReader & in);

/// Ground-truth sidecar: truth boxes with agent ids, plus the agent id behind each teacher box
/// (-1 for false positives).
void write_ground_truth(JsonlWriter & out, const LabeledScene & truth, const LabeledScene & teacher);
struct GroundTruthBlock
{
  LabeledScene truth;
  std::vector<std::vector<int>> teacher_agent_ids;
};
std::optional<GroundTruthBlock> read_ground_truth(JsonlReader & in);

}  // namespace trajlabel
