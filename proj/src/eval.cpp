// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "trajlabel/geometry.hpp"

namespace trajlabel
{

std::optional<double> MatchCriterion::affinity(const Box3D & pred, const Box3D & gt) const
{
  if (pred.class_id != gt.class_id) {
    return std::nullopt;
  }
  if (kind == Kind::CenterDistance) {
    const double d = center_distance(pred, gt);
    if (d <= threshold) {
      return -d;
    }
    return std::nullopt;
  }
  const double iou = bev_iou(pred, gt);
  if (iou >= threshold) {
    return iou;
  }
  return std::nullopt;
}

std::vector<std::string> MatchCriterion::validate() const
{
  std::vector<std::string> out;
  if (kind == Kind::CenterDistance && !(threshold > 0.0)) {
    out.push_back("eval: center-distance threshold must be > 0");
  }
  if (kind == Kind::BevIou && !(threshold > 0.0 && threshold <= 1.0)) {
    out.push_back("eval: IoU threshold must lie in (0, 1]");
  }
  return out;
}

std::string MatchCriterion::describe() const
{
  std::ostringstream os;
  os << (kind == Kind::CenterDistance ? "dist" : "iou") << ":" << threshold;
  return os.str();
}

FrameMatch match_frame(
  std::span<const Box3D> preds, std::span<const Box3D> gts, const MatchCriterion & crit)
{
  FrameMatch out;
  std::vector<bool> used(gts.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    std::optional<std::size_t> best;
    double best_aff = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g]) {
        continue;
      }
      const auto aff = crit.affinity(preds[p], gts[g]);
      if (aff && (!best || *aff > best_aff)) {
        best = g;
        best_aff = *aff;
      }
    }
    if (best) {
      used[*best] = true;
      out.true_positives.emplace_back(p, *best);
    } else {
      out.false_positives.push_back(p);
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!used[g]) {
      out.false_negatives.push_back(g);
    }
  }
  return out;
}

FrameMatch match_frame(
  std::span<const WeightedLabel> preds, std::span<const Box3D> gts, const MatchCriterion & crit)
{
  std::vector<Box3D> boxes;
  boxes.reserve(preds.size());
  for (const WeightedLabel & l : preds) {
    boxes.push_back(l.box);
  }
  return match_frame(boxes, gts, crit);
}

PrecisionRecall precision_recall(std::span<const FrameMatch> frames)
{
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const FrameMatch & m : frames) {
    tp += m.true_positives.size();
    fp += m.false_positives.size();
    fn += m.false_negatives.size();
  }
  PrecisionRecall out;
  if (tp + fp > 0) {
    out.precision = double(tp) / double(tp + fp);
  }
  if (tp + fn > 0) {
    out.recall = double(tp) / double(tp + fn);
  }
  return out;
}

namespace
{

struct RankedHit
{
  double key;
  std::size_t frame;
  std::size_t index;
  bool tp;
};

std::vector<PrPoint> pr_curve(std::vector<RankedHit> hits, std::size_t n_gt)
{
  std::sort(hits.begin(), hits.end(), [](const RankedHit & a, const RankedHit & b) {
    if (a.key != b.key) {
      return a.key > b.key;
    }
    return std::tie(a.frame, a.index) < std::tie(b.frame, b.index);
  });
  std::vector<PrPoint> curve;
  curve.reserve(hits.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    tp += hits[i].tp ? 1 : 0;
    const double precision = double(tp) / double(i + 1);
    const double recall = n_gt ? double(tp) / double(n_gt) : 0.0;
    curve.push_back({hits[i].key, precision, recall});
  }
  return curve;
}

double area_all_points(const std::vector<PrPoint> & curve)
{
  // Precision envelope: running max from the right.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return std::clamp(ap, 0.0, 1.0);
}

}  // namespace

double average_precision(
  std::span<const RankedPrediction> preds, std::span<const std::vector<Box3D>> gts,
  const MatchCriterion & crit)
{
  std::size_t n_gt = 0;
  for (const auto & frame : gts) {
    n_gt += frame.size();
  }
  if (n_gt == 0) {
    return 0.0;
  }
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const RankedPrediction & pa = preds[a];
    const RankedPrediction & pb = preds[b];
    if (pa.score != pb.score) {
      return pa.score > pb.score;
    }
    return std::tie(pa.frame, pa.index) < std::tie(pb.frame, pb.index);
  });
  std::vector<std::vector<bool>> used(gts.size());
  for (std::size_t f = 0; f < gts.size(); ++f) {
    used[f].assign(gts[f].size(), false);
  }
  std::vector<RankedHit> hits;
  hits.reserve(preds.size());
  for (std::size_t idx : order) {
    const RankedPrediction & p = preds[idx];
    bool tp = false;
    if (p.frame >= 0 && static_cast<std::size_t>(p.frame) < gts.size()) {
      const auto & frame_gts = gts[static_cast<std::size_t>(p.frame)];
      auto & frame_used = used[static_cast<std::size_t>(p.frame)];
      std::optional<std::size_t> best;
      double best_aff = 0.0;
      for (std::size_t g = 0; g < frame_gts.size(); ++g) {
        if (frame_used[g]) {
          continue;
        }
        const auto aff = crit.affinity(p.box, frame_gts[g]);
        if (aff && (!best || *aff > best_aff)) {
          best = g;
          best_aff = *aff;
        }
      }
      if (best) {
        frame_used[*best] = true;
        tp = true;
      }
    }
    hits.push_back({p.score, static_cast<std::size_t>(p.frame), p.index, tp});
  }
  return area_all_points(pr_curve(std::move(hits), n_gt));
}

void ApAccumulator::add_frame(
  std::span<const Box3D> preds, std::span<const double> keys, std::span<const Box3D> gts)
{
  const FrameMatch m = match_frame(preds, gts, crit_);
  std::vector<bool> tp(preds.size(), false);
  for (const auto & [p, g] : m.true_positives) {
    tp[p] = true;
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    hits_[preds[p].class_id].push_back({keys[p], frames_, p, tp[p]});
  }
  for (const Box3D & g : gts) {
    gt_count_[g.class_id] += 1;
  }
  ++frames_;
}

std::map<ClassId, std::vector<PrPoint>> ApAccumulator::per_class_curve() const
{
  std::map<ClassId, std::vector<PrPoint>> out;
  for (const auto & [cls, n_gt] : gt_count_) {
    std::vector<RankedHit> hits;
    auto it = hits_.find(cls);
    if (it != hits_.end()) {
      for (const Hit & h : it->second) {
        hits.push_back({h.key, h.frame, h.index, h.tp});
      }
    }
    out[cls] = pr_curve(std::move(hits), n_gt);
  }
  return out;
}

std::map<ClassId, double> ApAccumulator::per_class_ap() const
{
  std::map<ClassId, double> out;
  for (const auto & [cls, curve] : per_class_curve()) {
    out[cls] = area_all_points(curve);
  }
  return out;
}

std::optional<double> ApAccumulator::mean_ap() const
{
  const auto aps = per_class_ap();
  if (aps.empty()) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (const auto & [cls, ap] : aps) {
    sum += ap;
  }
  return sum / double(aps.size());
}

std::optional<double> BucketReport::teacher_precision() const
{
  if (teacher_labels == 0) {
    return std::nullopt;
  }
  return double(teacher_tp) / double(teacher_labels);
}

std::optional<double> BucketReport::teacher_recall() const
{
  if (gt_objects == 0) {
    return std::nullopt;
  }
  return double(teacher_tp) / double(gt_objects);
}

std::optional<double> BucketReport::enhanced_recall() const
{
  if (gt_objects == 0) {
    return std::nullopt;
  }
  return double(teacher_tp + inserted_tp) / double(gt_objects);
}

std::optional<double> BucketReport::inserted_precision() const
{
  if (inserted_labels == 0) {
    return std::nullopt;
  }
  return double(inserted_tp) / double(inserted_labels);
}

namespace
{

// Stable descending-score order of the labels with the given origin.
std::vector<std::size_t> ranked_labels(const EnhancedFrame & frame, LabelOrigin origin)
{
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < frame.labels.size(); ++i) {
    if (frame.labels[i].origin == origin) {
      idx.push_back(i);
    }
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return frame.labels[a].box.score > frame.labels[b].box.score;
  });
  return idx;
}

struct TwoStageMatch
{
  std::vector<std::size_t> teacher;   // label indices, ranked
  std::vector<bool> teacher_tp;       // aligned with teacher
  std::vector<std::size_t> inserted;  // label indices, ranked
  std::vector<bool> inserted_tp;
  std::set<std::size_t> recovered_gt;
};

TwoStageMatch two_stage_match(
  const EnhancedFrame & frame, std::span<const Box3D> gts, const MatchCriterion & crit)
{
  TwoStageMatch out;
  out.teacher = ranked_labels(frame, LabelOrigin::Teacher);
  std::vector<Box3D> boxes;
  for (std::size_t i : out.teacher) {
    boxes.push_back(frame.labels[i].box);
  }
  const FrameMatch first = match_frame(boxes, gts, crit);
  out.teacher_tp.assign(out.teacher.size(), false);
  for (const auto & [p, g] : first.true_positives) {
    out.teacher_tp[p] = true;
  }

  std::vector<Box3D> leftover;
  for (std::size_t g : first.false_negatives) {
    leftover.push_back(gts[g]);
  }
  out.inserted = ranked_labels(frame, LabelOrigin::Inserted);
  boxes.clear();
  for (std::size_t i : out.inserted) {
    boxes.push_back(frame.labels[i].box);
  }
  const FrameMatch second = match_frame(boxes, leftover, crit);
  out.inserted_tp.assign(out.inserted.size(), false);
  for (const auto & [p, g] : second.true_positives) {
    out.inserted_tp[p] = true;
    out.recovered_gt.insert(first.false_negatives[g]);
  }
  return out;
}

}  // namespace

void BucketAccumulator::add(const EnhancedFrame & frame, std::span<const Box3D> gts)
{
  const TwoStageMatch m = two_stage_match(frame, gts, crit_);
  for (std::size_t k = 0; k < m.teacher.size(); ++k) {
    const std::size_t label = m.teacher[k];
    const int count = label < frame.match_counts.size() ? frame.match_counts[label] : 0;
    Bucket & b = report_.buckets[count];
    b.support += 1;
    b.true_positives += m.teacher_tp[k] ? 1 : 0;
    report_.teacher_tp += m.teacher_tp[k] ? 1 : 0;
  }
  report_.teacher_labels += m.teacher.size();
  report_.inserted_labels += m.inserted.size();
  report_.inserted_tp += m.recovered_gt.size();
  report_.gt_objects += gts.size();
}

BucketReport bucket_report(
  std::span<const EnhancedFrame> enhanced, std::span<const std::vector<Box3D>> gts,
  const MatchCriterion & crit)
{
  BucketAccumulator acc(crit);
  for (std::size_t i = 0; i < enhanced.size(); ++i) {
    acc.add(enhanced[i], i < gts.size() ? std::span<const Box3D>(gts[i]) : std::span<const Box3D>());
  }
  return acc.report();
}

std::optional<double> RecoveryStats::rate() const
{
  if (trackable_missed == 0) {
    return std::nullopt;
  }
  return double(recovered) / double(trackable_missed);
}

RecoveryStats missed_object_recovery(
  const LabeledScene & truth, const LabeledScene & teacher,
  std::span<const EnhancedFrame> enhanced, double tau_conf, int min_context, int window,
  const MatchCriterion & crit)
{
  RecoveryStats stats;
  const std::size_t n = std::min({truth.scene.frames.size(), teacher.scene.frames.size(),
                                  enhanced.size()});
  // Agents detected above threshold, per frame.
  std::vector<std::set<int>> detected(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Frame & tf = teacher.scene.frames[f];
    for (std::size_t b = 0; b < tf.boxes.size(); ++b) {
      const int id = teacher.agent_ids[f][b];
      if (id >= 0 && tf.boxes[b].score >= tau_conf) {
        detected[f].insert(id);
      }
    }
  }
  for (std::size_t f = 0; f < n; ++f) {
    const Frame & gf = truth.scene.frames[f];
    const TwoStageMatch m = two_stage_match(enhanced[f], gf.boxes, crit);
    for (std::size_t g = 0; g < gf.boxes.size(); ++g) {
      const int id = truth.agent_ids[f][g];
      if (detected[f].count(id)) {
        continue;
      }
      int prior = 0;
      const std::size_t lo = f >= static_cast<std::size_t>(window) ? f - window : 0;
      for (std::size_t p = lo; p < f; ++p) {
        prior += detected[p].count(id) ? 1 : 0;
      }
      if (prior < min_context) {
        continue;
      }
      stats.trackable_missed += 1;
      stats.recovered += m.recovered_gt.count(g) ? 1 : 0;
    }
  }
  return stats;
}

}  // namespace trajlabel
