// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajlabel/config.hpp"
#include "trajlabel/eval.hpp"
#include "trajlabel/io.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel
{

struct StageTimings
{
  double filter_s = 0.0;
  double track_s = 0.0;
  double forecast_s = 0.0;
  double enhance_s = 0.0;
  double eval_s = 0.0;
  double io_s = 0.0;
};

struct SceneResult
{
  std::string scene_id;
  std::vector<Track> tracks;
  std::vector<ForecastSet> forecasts;
  std::vector<EnhancedFrame> enhanced;
  std::size_t labels_in = 0;
  std::size_t labels_filtered = 0;
  StageTimings timings;
};

/// Confidence-filters each frame and enhances it with the forecasts targeting it.
std::vector<EnhancedFrame> enhance_scene(
  const Scene & scene, std::span<const ForecastSet> forecasts, double tau_conf,
  const EnhancerConfig & cfg);

/// filter -> track -> forecast -> enhance for one scene, in memory.
SceneResult process_scene(const Scene & scene, const PipelineConfig & cfg);

struct RunError
{
  std::string source;
  std::string message;
  int exit_code = 1;  // 1 validation, 2 I/O
};

struct EvalSummary
{
  BucketReport buckets;
  std::map<ClassId, double> teacher_ap;
  std::map<ClassId, double> enhanced_ap;
  RecoveryStats recovery;
};

struct RunReport
{
  std::size_t scenes = 0;
  std::size_t frames = 0;
  std::size_t labels_in = 0;
  std::size_t labels_filtered = 0;
  std::size_t teacher_labels_out = 0;
  std::size_t inserted_labels = 0;
  double mean_weight = 0.0;
  StageTimings timings;
  double wall_s = 0.0;
  std::map<std::string, std::string> digests;  // output file name -> digest
  std::vector<RunError> errors;
  std::optional<EvalSummary> eval;

  nlohmann::json to_json() const;
  int exit_code() const;
};

/// Streams scenes from `scene_files` through the pipeline, writing tracks.jsonl,
/// forecasts.jsonl and enhanced.jsonl (plus report.json and, with ground truth, the CSV
/// reports) into cfg.output_dir. Scenes are processed in parallel batches of cfg.jobs and
/// written in input order, so the outputs do not depend on cfg.jobs. A file that fails to
/// open or parse is recorded in the report and the remaining files still run.
RunReport run_pipeline(
  std::span<const std::filesystem::path> scene_files,
  const std::optional<std::filesystem::path> & ground_truth, const PipelineConfig & cfg);

/// In-memory variant over already-loaded scenes (and optional aligned ground truth).
RunReport run_pipeline(
  std::span<const Scene> scenes, std::span<const GroundTruthBlock> ground_truth,
  const PipelineConfig & cfg);

/// Writes metrics.csv, buckets.csv and pr_curve.csv into `dir`.
void write_eval_reports(
  const std::filesystem::path & dir, const EvalSummary & eval, const ApAccumulator & teacher,
  const ApAccumulator & enhanced, const MatchCriterion & crit);

struct TrainingBatch
{
  std::vector<std::string> labeled;
  std::vector<std::string> unlabeled;
};

struct BatchManifest
{
  std::uint64_t seed = 0;
  int batch_size = 2;
  std::vector<TrainingBatch> batches;
};

/// Batches holding batch_size / 2 labeled and batch_size / 2 unlabeled scene references.
/// Both lists are shuffled with `seed`; the larger one sets the epoch length and the smaller
/// one repeats cyclically. Throws std::invalid_argument on empty inputs or an odd batch size.
BatchManifest export_training_set(
  std::span<const std::string> labeled, std::span<const std::string> unlabeled, int batch_size,
  std::uint64_t seed);

std::string write_manifest(const std::filesystem::path & path, const BatchManifest & manifest);

}  // namespace trajlabel
