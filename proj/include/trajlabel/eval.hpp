// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajlabel/simulator.hpp"
#include "trajlabel/types.hpp"

namespace trajlabel
{

/// Class-aware match rule between a prediction and a ground-truth box.
struct MatchCriterion
{
  enum class Kind { CenterDistance, BevIou };

  Kind kind = Kind::CenterDistance;
  double threshold = 2.0;

  /// Higher is better; nullopt when the pair does not satisfy the rule.
  std::optional<double> affinity(const Box3D & pred, const Box3D & gt) const;
  std::vector<std::string> validate() const;
  std::string describe() const;
};

struct FrameMatch
{
  std::vector<std::pair<std::size_t, std::size_t>> true_positives;  // (pred, gt)
  std::vector<std::size_t> false_positives;
  std::vector<std::size_t> false_negatives;
};

/// Greedy one-to-one matching in the given prediction order. Each prediction takes the best
/// unmatched same-class gt (nearest center, or highest IoU) satisfying the criterion.
FrameMatch match_frame(
  std::span<const Box3D> preds, std::span<const Box3D> gts, const MatchCriterion & crit);
FrameMatch match_frame(
  std::span<const WeightedLabel> preds, std::span<const Box3D> gts, const MatchCriterion & crit);

struct PrecisionRecall
{
  std::optional<double> precision;  // absent without predictions
  std::optional<double> recall;     // absent without ground truth
};

PrecisionRecall precision_recall(std::span<const FrameMatch> frames);

struct RankedPrediction
{
  int frame = 0;  // index into the per-frame gt list
  std::size_t index = 0;
  double score = 0.0;
  Box3D box;
};

struct PrPoint
{
  double score;
  double precision;
  double recall;
};

/// All-points interpolated area under the precision-recall curve. Predictions are ranked
/// globally by score (ties: frame, then index) and matched greedily per frame.
/// Returns 0 when there is no ground truth.
double average_precision(
  std::span<const RankedPrediction> preds, std::span<const std::vector<Box3D>> gts,
  const MatchCriterion & crit);

/// Streaming per-class AP. Frames are matched as they arrive; only (score, hit) pairs are kept.
class ApAccumulator
{
public:
  explicit ApAccumulator(MatchCriterion crit) : crit_(crit) {}

  /// `preds` must already be ordered by descending rank key `keys`.
  void add_frame(
    std::span<const Box3D> preds, std::span<const double> keys, std::span<const Box3D> gts);

  std::map<ClassId, double> per_class_ap() const;
  std::map<ClassId, std::vector<PrPoint>> per_class_curve() const;
  /// Mean over classes that have ground truth; nullopt if none.
  std::optional<double> mean_ap() const;

private:
  struct Hit
  {
    double key;
    std::size_t frame;
    std::size_t index;
    bool tp;
  };

  MatchCriterion crit_;
  std::size_t frames_ = 0;
  std::map<ClassId, std::vector<Hit>> hits_;
  std::map<ClassId, std::size_t> gt_count_;
};

struct Bucket
{
  std::size_t support = 0;
  std::size_t true_positives = 0;

  double precision() const { return support ? double(true_positives) / double(support) : 0.0; }
};

struct BucketReport
{
  std::map<int, Bucket> buckets;  // match count -> teacher labels
  std::size_t teacher_labels = 0;
  std::size_t teacher_tp = 0;
  std::size_t inserted_labels = 0;
  std::size_t inserted_tp = 0;  // gt objects matched only by inserted labels
  std::size_t gt_objects = 0;

  std::optional<double> teacher_precision() const;
  std::optional<double> teacher_recall() const;
  /// Recall of teacher plus inserted labels.
  std::optional<double> enhanced_recall() const;
  std::optional<double> inserted_precision() const;
};

/// Teacher labels are matched first (by descending score) and bucketed by match count; the
/// gt objects they leave unmatched are then offered to the inserted labels.
class BucketAccumulator
{
public:
  explicit BucketAccumulator(MatchCriterion crit) : crit_(crit) {}

  void add(const EnhancedFrame & frame, std::span<const Box3D> gts);
  const BucketReport & report() const { return report_; }

private:
  MatchCriterion crit_;
  BucketReport report_;
};

BucketReport bucket_report(
  std::span<const EnhancedFrame> enhanced, std::span<const std::vector<Box3D>> gts,
  const MatchCriterion & crit);

/// Objects the teacher missed at a frame although it had detected them (above tau_conf) in at
/// least `min_context` of the preceding `window` frames, and how many of those an inserted
/// label recovered.
struct RecoveryStats
{
  std::size_t trackable_missed = 0;
  std::size_t recovered = 0;

  std::optional<double> rate() const;
};

/// `enhanced` is aligned with the frames of `truth` and `teacher`.
RecoveryStats missed_object_recovery(
  const LabeledScene & truth, const LabeledScene & teacher,
  std::span<const EnhancedFrame> enhanced, double tau_conf, int min_context, int window,
  const MatchCriterion & crit);

}  // namespace trajlabel
