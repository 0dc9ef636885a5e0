// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "trajlabel/enhancer.hpp"
#include "trajlabel/forecaster.hpp"
#include "trajlabel/random.hpp"
#include "trajlabel/tracker.hpp"

namespace trajlabel
{

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace
{

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void add_timings(StageTimings & into, const StageTimings & t)
{
  into.filter_s += t.filter_s;
  into.track_s += t.track_s;
  into.forecast_s += t.forecast_s;
  into.enhance_s += t.enhance_s;
  into.eval_s += t.eval_s;
  into.io_s += t.io_s;
}

}  // namespace

std::vector<EnhancedFrame> enhance_scene(
  const Scene & scene, std::span<const ForecastSet> forecasts, double tau_conf,
  const EnhancerConfig & cfg)
{
  std::unordered_map<int, std::vector<ForecastSet>> by_target;
  for (const ForecastSet & s : forecasts) {
    by_target[s.target_frame].push_back(s);
  }
  std::vector<EnhancedFrame> out;
  out.reserve(scene.frames.size());
  static const std::vector<ForecastSet> none;
  for (const Frame & raw : scene.frames) {
    const Frame frame = confidence_filter(raw, tau_conf);
    auto it = by_target.find(frame.frame_index);
    out.push_back(enhance_frame(frame, it == by_target.end() ? none : it->second, cfg));
    out.back().scene_id = scene.scene_id;
  }
  return out;
}

SceneResult process_scene(const Scene & scene, const PipelineConfig & cfg)
{
  SceneResult r;
  r.scene_id = scene.scene_id;
  auto t0 = Clock::now();
  for (const Frame & f : scene.frames) {
    r.labels_in += f.boxes.size();
    r.labels_filtered += confidence_filter(f, cfg.tau_conf).boxes.size();
  }
  r.timings.filter_s = seconds_since(t0);

  t0 = Clock::now();
  r.tracks = build_tracks(scene, cfg.tau_conf, cfg.tracker);
  r.timings.track_s = seconds_since(t0);

  t0 = Clock::now();
  r.forecasts = generate_forecasts(r.tracks, scene, cfg.forecast);
  r.timings.forecast_s = seconds_since(t0);

  t0 = Clock::now();
  r.enhanced = enhance_scene(scene, r.forecasts, cfg.tau_conf, cfg.enhancer);
  r.timings.enhance_s = seconds_since(t0);
  return r;
}

int RunReport::exit_code() const
{
  int code = 0;
  for (const RunError & e : errors) {
    code = std::max(code, e.exit_code);
  }
  return code;
}

json RunReport::to_json() const
{
  json j{{"scenes", scenes},
         {"frames", frames},
         {"labels_in", labels_in},
         {"labels_after_confidence_filter", labels_filtered},
         {"teacher_labels_out", teacher_labels_out},
         {"inserted_labels", inserted_labels},
         {"mean_weight", mean_weight},
         {"timings_s",
          {{"filter", timings.filter_s},
           {"track", timings.track_s},
           {"forecast", timings.forecast_s},
           {"enhance", timings.enhance_s},
           {"eval", timings.eval_s},
           {"io", timings.io_s},
           {"wall", wall_s}}},
         {"digests", digests}};
  json errs = json::array();
  for (const RunError & e : errors) {
    errs.push_back({{"source", e.source}, {"message", e.message}, {"exit_code", e.exit_code}});
  }
  j["errors"] = errs;
  if (eval) {
    const BucketReport & b = eval->buckets;
    json buckets = json::array();
    for (const auto & [count, bucket] : b.buckets) {
      buckets.push_back({{"match_count", count},
                         {"support", bucket.support},
                         {"true_positives", bucket.true_positives},
                         {"precision", bucket.precision()}});
    }
    auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
    json teacher_ap = json::object();
    for (const auto & [cls, ap] : eval->teacher_ap) {
      teacher_ap[std::to_string(cls)] = ap;
    }
    json enhanced_ap = json::object();
    for (const auto & [cls, ap] : eval->enhanced_ap) {
      enhanced_ap[std::to_string(cls)] = ap;
    }
    j["eval"] = {{"buckets", buckets},
                 {"teacher_precision", opt(b.teacher_precision())},
                 {"teacher_recall", opt(b.teacher_recall())},
                 {"enhanced_recall", opt(b.enhanced_recall())},
                 {"inserted_precision", opt(b.inserted_precision())},
                 {"teacher_ap", teacher_ap},
                 {"enhanced_ap", enhanced_ap},
                 {"trackable_missed", eval->recovery.trackable_missed},
                 {"recovered", eval->recovery.recovered},
                 {"recovery_rate", opt(eval->recovery.rate())}};
  }
  return j;
}

namespace
{

struct SceneInput
{
  Scene scene;
  std::optional<GroundTruthBlock> gt;
};

// Label ranking keys for AP: teacher labels by score, enhanced labels by weight * score.
void add_ap_frame(
  ApAccumulator & teacher, ApAccumulator & enhanced, const EnhancedFrame & frame,
  std::span<const Box3D> gts)
{
  std::vector<std::size_t> t_idx, e_idx(frame.labels.size());
  for (std::size_t i = 0; i < frame.labels.size(); ++i) {
    e_idx[i] = i;
    if (frame.labels[i].origin == LabelOrigin::Teacher) {
      t_idx.push_back(i);
    }
  }
  auto key_t = [&](std::size_t i) { return frame.labels[i].box.score; };
  auto key_e = [&](std::size_t i) { return frame.labels[i].weight * frame.labels[i].box.score; };
  auto feed = [&](ApAccumulator & acc, std::vector<std::size_t> & idx, auto key) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return key(a) > key(b);
    });
    std::vector<Box3D> boxes;
    std::vector<double> keys;
    for (std::size_t i : idx) {
      boxes.push_back(frame.labels[i].box);
      keys.push_back(key(i));
    }
    acc.add_frame(boxes, keys, gts);
  };
  feed(teacher, t_idx, key_t);
  feed(enhanced, e_idx, key_e);
}

class Runner
{
public:
  Runner(const PipelineConfig & cfg, bool with_eval)
  : cfg_(cfg),
    with_eval_(with_eval),
    teacher_ap_(cfg.eval),
    enhanced_ap_(cfg.eval),
    buckets_(cfg.eval)
  {
    std::filesystem::create_directories(cfg.output_dir);
    tracks_ = std::make_unique<JsonlWriter>(cfg.output_dir / "tracks.jsonl");
    forecasts_ = std::make_unique<JsonlWriter>(cfg.output_dir / "forecasts.jsonl");
    enhanced_ = std::make_unique<JsonlWriter>(cfg.output_dir / "enhanced.jsonl");
    start_ = Clock::now();
  }

  std::size_t batch_capacity() const { return static_cast<std::size_t>(std::max(cfg_.jobs, 1)) * 2; }

  void run_batch(std::vector<SceneInput> & batch)
  {
    if (batch.empty()) {
      return;
    }
    std::vector<SceneResult> results(batch.size());
    std::vector<RecoveryStats> recovery(batch.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) {
        results[i] = process_scene(batch[i].scene, cfg_);
        if (batch[i].gt) {
          const auto t0 = Clock::now();
          LabeledScene teacher{batch[i].scene, batch[i].gt->teacher_agent_ids};
          recovery[i] = missed_object_recovery(
            batch[i].gt->truth, teacher, results[i].enhanced, cfg_.tau_conf,
            cfg_.forecast.min_context, cfg_.forecast.max_context, cfg_.eval);
          results[i].timings.eval_s += seconds_since(t0);
        }
      }
    };
    const std::size_t n_threads = std::min<std::size_t>(std::max(cfg_.jobs, 1), batch.size());
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back(work);
      }
      for (auto & th : pool) {
        th.join();
      }
    }

    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Scene & scene = batch[i].scene;
      SceneResult & r = results[i];
      auto t0 = Clock::now();
      write_tracks(*tracks_, r.scene_id, r.tracks);
      write_forecasts(*forecasts_, r.scene_id, r.forecasts);
      write_enhanced(*enhanced_, r.scene_id, r.enhanced);
      r.timings.io_s += seconds_since(t0);

      report_.scenes += 1;
      report_.frames += scene.frames.size();
      report_.labels_in += r.labels_in;
      report_.labels_filtered += r.labels_filtered;
      for (const EnhancedFrame & f : r.enhanced) {
        for (const WeightedLabel & l : f.labels) {
          weight_sum_ += l.weight;
          (l.origin == LabelOrigin::Teacher ? report_.teacher_labels_out : report_.inserted_labels) += 1;
        }
      }

      if (batch[i].gt) {
        t0 = Clock::now();
        const auto & gt_frames = batch[i].gt->truth.scene.frames;
        for (std::size_t f = 0; f < r.enhanced.size(); ++f) {
          buckets_.add(r.enhanced[f], gt_frames[f].boxes);
          add_ap_frame(teacher_ap_, enhanced_ap_, r.enhanced[f], gt_frames[f].boxes);
        }
        recovery_.trackable_missed += recovery[i].trackable_missed;
        recovery_.recovered += recovery[i].recovered;
        r.timings.eval_s += seconds_since(t0);
      }
      add_timings(report_.timings, r.timings);
    }
    batch.clear();
  }

  void error(std::string source, std::string message, int code)
  {
    report_.errors.push_back({std::move(source), std::move(message), code});
  }

  RunReport finish()
  {
    report_.digests["tracks.jsonl"] = tracks_->finish();
    report_.digests["forecasts.jsonl"] = forecasts_->finish();
    report_.digests["enhanced.jsonl"] = enhanced_->finish();
    const std::size_t n_labels = report_.teacher_labels_out + report_.inserted_labels;
    report_.mean_weight = n_labels ? weight_sum_ / double(n_labels) : 0.0;
    if (with_eval_) {
      EvalSummary summary;
      summary.buckets = buckets_.report();
      summary.teacher_ap = teacher_ap_.per_class_ap();
      summary.enhanced_ap = enhanced_ap_.per_class_ap();
      summary.recovery = recovery_;
      write_eval_reports(cfg_.output_dir, summary, teacher_ap_, enhanced_ap_, cfg_.eval);
      report_.eval = std::move(summary);
    }
    report_.wall_s = seconds_since(start_);
    std::ofstream out(cfg_.output_dir / "report.json");
    out << report_.to_json().dump(2) << '\n';
    if (!out) {
      throw IoError("cannot write report.json");
    }
    return report_;
  }

private:
  const PipelineConfig & cfg_;
  bool with_eval_;
  std::unique_ptr<JsonlWriter> tracks_, forecasts_, enhanced_;
  ApAccumulator teacher_ap_, enhanced_ap_;
  BucketAccumulator buckets_;
  RecoveryStats recovery_;
  double weight_sum_ = 0.0;
  RunReport report_;
  Clock::time_point start_;
};

std::optional<std::string> gt_mismatch(const Scene & scene, const GroundTruthBlock & gt)
{
  if (gt.truth.scene.scene_id != scene.scene_id) {
    return "ground truth scene '" + gt.truth.scene.scene_id + "' does not match scene '" +
           scene.scene_id + "'";
  }
  if (gt.truth.scene.frames.size() != scene.frames.size()) {
    return "ground truth for '" + scene.scene_id + "' has a different frame count";
  }
  for (std::size_t f = 0; f < scene.frames.size(); ++f) {
    if (gt.teacher_agent_ids[f].size() != scene.frames[f].boxes.size()) {
      return "ground truth for '" + scene.scene_id + "' frame " + std::to_string(f) +
             " does not match the teacher box count";
    }
  }
  return std::nullopt;
}

}  // namespace

RunReport run_pipeline(
  std::span<const std::filesystem::path> scene_files,
  const std::optional<std::filesystem::path> & ground_truth, const PipelineConfig & cfg)
{
  Runner runner(cfg, ground_truth.has_value());
  std::unique_ptr<JsonlReader> gt_reader;
  bool gt_ok = false;
  if (ground_truth) {
    try {
      gt_reader = std::make_unique<JsonlReader>(*ground_truth);
      gt_ok = true;
    } catch (const IoError & e) {
      runner.error(ground_truth->string(), e.what(), 2);
    }
  }

  std::vector<SceneInput> batch;
  for (const auto & path : scene_files) {
    try {
      JsonlReader in(path);
      while (auto scene = read_scene(in)) {
        SceneInput input{std::move(*scene), std::nullopt};
        if (gt_ok) {
          try {
            auto block = read_ground_truth(*gt_reader);
            if (!block) {
              throw FormatError("ground truth ended before scene '" + input.scene.scene_id + "'", 0);
            }
            if (auto why = gt_mismatch(input.scene, *block)) {
              throw FormatError(*why, 0);
            }
            input.gt = std::move(*block);
          } catch (const FormatError & e) {
            runner.error(ground_truth->string(), e.what(), 1);
            gt_ok = false;
          }
        }
        batch.push_back(std::move(input));
        if (batch.size() >= runner.batch_capacity()) {
          runner.run_batch(batch);
        }
      }
    } catch (const FormatError & e) {
      runner.error(path.string(), e.what(), 1);
    } catch (const IoError & e) {
      runner.error(path.string(), e.what(), 2);
    }
  }
  runner.run_batch(batch);
  return runner.finish();
}

RunReport run_pipeline(
  std::span<const Scene> scenes, std::span<const GroundTruthBlock> ground_truth,
  const PipelineConfig & cfg)
{
  const bool with_gt = !ground_truth.empty();
  Runner runner(cfg, with_gt);
  std::vector<SceneInput> batch;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    SceneInput input{scenes[i], std::nullopt};
    if (with_gt) {
      if (i < ground_truth.size() && !gt_mismatch(scenes[i], ground_truth[i])) {
        input.gt = ground_truth[i];
      } else {
        runner.error(scenes[i].scene_id, "missing or mismatched ground truth", 1);
      }
    }
    batch.push_back(std::move(input));
    if (batch.size() >= runner.batch_capacity()) {
      runner.run_batch(batch);
    }
  }
  runner.run_batch(batch);
  return runner.finish();
}

void write_eval_reports(
  const std::filesystem::path & dir, const EvalSummary & eval, const ApAccumulator & teacher,
  const ApAccumulator & enhanced, const MatchCriterion & crit)
{
  const ClassRegistry registry;
  const std::string thr = crit.describe();
  auto num = [](double v) { return json(v).dump(); };

  std::ofstream metrics(dir / "metrics.csv");
  metrics << "metric,class,threshold,value\n";
  for (const auto & [cls, ap] : eval.teacher_ap) {
    metrics << "ap_teacher," << registry.name(cls) << ',' << thr << ',' << num(ap) << '\n';
  }
  for (const auto & [cls, ap] : eval.enhanced_ap) {
    metrics << "ap_enhanced," << registry.name(cls) << ',' << thr << ',' << num(ap) << '\n';
  }
  if (auto m = teacher.mean_ap()) {
    metrics << "map_teacher,all," << thr << ',' << num(*m) << '\n';
  }
  if (auto m = enhanced.mean_ap()) {
    metrics << "map_enhanced,all," << thr << ',' << num(*m) << '\n';
  }
  const BucketReport & b = eval.buckets;
  auto opt_row = [&](const char * name, std::optional<double> v) {
    if (v) {
      metrics << name << ",all," << thr << ',' << num(*v) << '\n';
    }
  };
  opt_row("precision_teacher", b.teacher_precision());
  opt_row("recall_teacher", b.teacher_recall());
  opt_row("recall_enhanced", b.enhanced_recall());
  opt_row("precision_inserted", b.inserted_precision());
  opt_row("missed_recovery_rate", eval.recovery.rate());

  std::ofstream buckets(dir / "buckets.csv");
  buckets << "match_count,support,true_positives,precision\n";
  for (const auto & [count, bucket] : b.buckets) {
    buckets << count << ',' << bucket.support << ',' << bucket.true_positives << ','
            << num(bucket.precision()) << '\n';
  }

  std::ofstream pr(dir / "pr_curve.csv");
  pr << "source,class,threshold,rank,score,precision,recall\n";
  auto dump_curve = [&](const char * source, const ApAccumulator & acc) {
    for (const auto & [cls, curve] : acc.per_class_curve()) {
      for (std::size_t i = 0; i < curve.size(); ++i) {
        pr << source << ',' << registry.name(cls) << ',' << thr << ',' << i << ','
           << num(curve[i].score) << ',' << num(curve[i].precision) << ','
           << num(curve[i].recall) << '\n';
      }
    }
  };
  dump_curve("teacher", teacher);
  dump_curve("enhanced", enhanced);
  if (!metrics || !buckets || !pr) {
    throw IoError("cannot write eval reports into '" + dir.string() + "'");
  }
}

BatchManifest export_training_set(
  std::span<const std::string> labeled, std::span<const std::string> unlabeled, int batch_size,
  std::uint64_t seed)
{
  if (labeled.empty() || unlabeled.empty()) {
    throw std::invalid_argument("export_training_set needs labeled and unlabeled scenes");
  }
  if (batch_size < 2 || batch_size % 2 != 0) {
    throw std::invalid_argument("batch_size must be a positive even number");
  }
  auto shuffled = [&](std::span<const std::string> ids, std::uint32_t stream) {
    std::vector<std::string> v(ids.begin(), ids.end());
    CounterRng rng(seed, {stream, 0, 4});
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng.below(i)]);
    }
    return v;
  };
  const std::vector<std::string> lab = shuffled(labeled, 0);
  const std::vector<std::string> unl = shuffled(unlabeled, 1);
  const std::size_t half = static_cast<std::size_t>(batch_size / 2);
  const std::size_t longest = std::max(lab.size(), unl.size());
  const std::size_t n_batches = (longest + half - 1) / half;

  BatchManifest m;
  m.seed = seed;
  m.batch_size = batch_size;
  for (std::size_t b = 0; b < n_batches; ++b) {
    TrainingBatch batch;
    for (std::size_t k = 0; k < half; ++k) {
      const std::size_t slot = b * half + k;
      batch.labeled.push_back(lab[slot % lab.size()]);
      batch.unlabeled.push_back(unl[slot % unl.size()]);
    }
    m.batches.push_back(std::move(batch));
  }
  return m;
}

std::string write_manifest(const std::filesystem::path & path, const BatchManifest & manifest)
{
  JsonlWriter out(path);
  out.write(json{{"kind", "batch_manifest"}, {"seed", manifest.seed},
                 {"batch_size", manifest.batch_size}, {"n_records", manifest.batches.size()},
                 {"format_version", kFormatVersion}});
  for (std::size_t i = 0; i < manifest.batches.size(); ++i) {
    out.write(json{{"batch_index", i}, {"labeled", manifest.batches[i].labeled},
                   {"unlabeled", manifest.batches[i].unlabeled}});
  }
  return out.finish();
}

}  // namespace trajlabel
