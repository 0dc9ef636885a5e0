// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "trajlabel/config.hpp"
#include "trajlabel/enhancer.hpp"
#include "trajlabel/forecaster.hpp"
#include "trajlabel/io.hpp"
#include "trajlabel/pipeline.hpp"
#include "trajlabel/simulator.hpp"
#include "trajlabel/tracker.hpp"

namespace trajlabel
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

struct GlobalOptions
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out = "out";
};

PipelineConfig resolve_config(const GlobalOptions & g)
{
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed) {
    cfg.simulation.seed = *g.seed;
    cfg.manifest_seed = *g.seed;
  }
  if (g.jobs) {
    cfg.jobs = *g.jobs;
  }
  cfg.output_dir = g.out;
  const auto problems = cfg.validate();
  if (!problems.empty()) {
    throw ConfigError(problems.front());
  }
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::string with_path(const fs::path & path, const std::exception & e)
{
  return path.string() + ": " + e.what();
}

int cmd_simulate(const GlobalOptions & g, std::optional<int> n_scenes, std::optional<int> n_frames,
                 std::optional<int> n_agents, int n_labeled)
{
  PipelineConfig cfg = resolve_config(g);
  SimulationConfig & sim = cfg.simulation;
  if (n_scenes) sim.n_scenes = *n_scenes;
  if (n_frames) sim.n_frames = *n_frames;
  if (n_agents) sim.agents_per_scene = *n_agents;
  const auto problems = sim.validate();
  if (!problems.empty()) {
    throw ConfigError(problems.front());
  }
  JsonlWriter scenes(cfg.output_dir / "scenes.jsonl");
  JsonlWriter truth(cfg.output_dir / "truth.jsonl");
  JsonlWriter gt(cfg.output_dir / "gt.jsonl");
  for (int s = 0; s < sim.n_scenes; ++s) {
    const SimulatedScene sc = simulate_scene(sim, s);
    write_scene(scenes, sc.teacher.scene);
    write_scene(truth, sc.truth.scene);
    write_ground_truth(gt, sc.truth, sc.teacher);
  }
  std::cout << "scenes.jsonl " << scenes.finish() << '\n';
  std::cout << "truth.jsonl " << truth.finish() << '\n';
  std::cout << "gt.jsonl " << gt.finish() << '\n';
  if (n_labeled > 0) {
    JsonlWriter labeled(cfg.output_dir / "labeled.jsonl");
    for (int s = 0; s < n_labeled; ++s) {
      SimulatedScene sc = simulate_scene(sim, sim.n_scenes + s);
      sc.truth.scene.labeled = true;
      write_scene(labeled, sc.truth.scene);
    }
    std::cout << "labeled.jsonl " << labeled.finish() << '\n';
  }
  return kExitOk;
}

int cmd_track(const GlobalOptions & g, const fs::path & scene_path)
{
  const PipelineConfig cfg = resolve_config(g);
  JsonlReader in(scene_path);
  JsonlWriter out(cfg.output_dir / "tracks.jsonl");
  while (auto scene = read_scene(in)) {
    const auto tracks = build_tracks(*scene, cfg.tau_conf, cfg.tracker);
    write_tracks(out, scene->scene_id, tracks);
  }
  std::cout << "tracks.jsonl " << out.finish() << '\n';
  return kExitOk;
}

int cmd_forecast(const GlobalOptions & g, const fs::path & scene_path, const fs::path & track_path)
{
  const PipelineConfig cfg = resolve_config(g);
  JsonlReader scenes(scene_path);
  JsonlReader tracks(track_path);
  JsonlWriter out(cfg.output_dir / "forecasts.jsonl");
  while (auto scene = read_scene(scenes)) {
    auto block = read_tracks(tracks);
    if (!block || block->scene_id != scene->scene_id) {
      throw FormatError(
        track_path.string() + ": no track block for scene '" + scene->scene_id + "'",
        tracks.line());
    }
    const auto sets = generate_forecasts(block->tracks, *scene, cfg.forecast);
    write_forecasts(out, scene->scene_id, sets);
  }
  std::cout << "forecasts.jsonl " << out.finish() << '\n';
  return kExitOk;
}

int cmd_enhance(const GlobalOptions & g, const fs::path & scene_path, const fs::path & forecast_path)
{
  const PipelineConfig cfg = resolve_config(g);
  JsonlReader scenes(scene_path);
  JsonlReader forecasts(forecast_path);
  JsonlWriter out(cfg.output_dir / "enhanced.jsonl");
  std::optional<ForecastBlock> headerless;
  while (auto scene = read_scene(scenes)) {
    std::vector<ForecastSet> sets;
    if (headerless) {
      throw FormatError(
        forecast_path.string() + ": a headerless forecast file can only serve one scene", 0);
    }
    auto block = read_forecasts(forecasts);
    if (block && block->scene_id.empty()) {
      headerless = block;
    } else if (!block || block->scene_id != scene->scene_id) {
      throw FormatError(
        forecast_path.string() + ": no forecast block for scene '" + scene->scene_id + "'",
        forecasts.line());
    }
    if (block) {
      sets = std::move(block->sets);
    }
    const auto frames = enhance_scene(*scene, sets, cfg.tau_conf, cfg.enhancer);
    write_enhanced(out, scene->scene_id, frames);
  }
  std::cout << "enhanced.jsonl " << out.finish() << '\n';
  return kExitOk;
}

int cmd_eval(const GlobalOptions & g, const fs::path & label_path, const fs::path & gt_path)
{
  const PipelineConfig cfg = resolve_config(g);
  JsonlReader labels(label_path);
  JsonlReader gt(gt_path);
  ApAccumulator teacher_ap(cfg.eval), enhanced_ap(cfg.eval);
  BucketAccumulator buckets(cfg.eval);

  while (labels.peek()) {
    std::vector<EnhancedFrame> frames;
    std::string scene_id;
    if (labels.peek()->value("kind", "") == "enhanced") {
      auto block = read_enhanced(labels);
      scene_id = block->scene_id;
      frames = std::move(block->frames);
    } else {
      auto scene = read_scene(labels);
      scene_id = scene->scene_id;
      for (const Frame & f : scene->frames) {
        EnhancedFrame ef;
        ef.scene_id = scene_id;
        ef.frame_index = f.frame_index;
        for (const Box3D & b : f.boxes) {
          ef.labels.push_back({b, 1.0, LabelOrigin::Teacher, -1});
          ef.match_counts.push_back(0);
        }
        frames.push_back(std::move(ef));
      }
    }
    auto truth = read_ground_truth(gt);
    if (!truth || truth->truth.scene.scene_id != scene_id ||
        truth->truth.scene.frames.size() != frames.size()) {
      throw FormatError(gt_path.string() + ": ground truth does not line up with scene '" +
                          scene_id + "'",
                        gt.line());
    }
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const auto & gts = truth->truth.scene.frames[f].boxes;
      buckets.add(frames[f], gts);
      // Same ranking keys as the pipeline's report.
      std::vector<std::size_t> t_idx, e_idx;
      for (std::size_t i = 0; i < frames[f].labels.size(); ++i) {
        e_idx.push_back(i);
        if (frames[f].labels[i].origin == LabelOrigin::Teacher) {
          t_idx.push_back(i);
        }
      }
      auto feed = [&](ApAccumulator & acc, std::vector<std::size_t> idx, bool weighted) {
        const auto & L = frames[f].labels;
        auto key = [&](std::size_t i) { return weighted ? L[i].weight * L[i].box.score : L[i].box.score; };
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
        std::vector<Box3D> boxes;
        std::vector<double> keys;
        for (std::size_t i : idx) {
          boxes.push_back(L[i].box);
          keys.push_back(key(i));
        }
        acc.add_frame(boxes, keys, gts);
      };
      feed(teacher_ap, t_idx, false);
      feed(enhanced_ap, e_idx, true);
    }
  }
  EvalSummary summary;
  summary.buckets = buckets.report();
  summary.teacher_ap = teacher_ap.per_class_ap();
  summary.enhanced_ap = enhanced_ap.per_class_ap();
  write_eval_reports(cfg.output_dir, summary, teacher_ap, enhanced_ap, cfg.eval);
  const ClassRegistry registry;
  for (const auto & [cls, ap] : summary.teacher_ap) {
    std::cout << "AP " << registry.name(cls) << " " << ap << '\n';
  }
  return kExitOk;
}

int cmd_pipeline(const GlobalOptions & g, const std::vector<std::string> & scene_paths,
                 const std::string & gt_path)
{
  const PipelineConfig cfg = resolve_config(g);
  std::vector<fs::path> files(scene_paths.begin(), scene_paths.end());
  std::optional<fs::path> gt;
  if (!gt_path.empty()) {
    gt = gt_path;
  }
  const RunReport report = run_pipeline(files, gt, cfg);
  for (const RunError & e : report.errors) {
    std::cerr << "error: " << e.source << ": " << e.message << '\n';
  }
  for (const auto & [name, digest] : report.digests) {
    std::cout << name << ' ' << digest << '\n';
  }
  std::cout << "scenes " << report.scenes << " frames " << report.frames << " wall_s "
            << report.wall_s << '\n';
  return report.exit_code();
}

std::vector<std::string> scene_ids_of(const fs::path & path)
{
  JsonlReader in(path);
  std::vector<std::string> ids;
  while (in.peek()) {
    if (in.peek()->value("kind", "") == "enhanced") {
      ids.push_back(read_enhanced(in)->scene_id);
    } else {
      ids.push_back(read_scene(in)->scene_id);
    }
  }
  return ids;
}

int cmd_export(const GlobalOptions & g, const std::vector<std::string> & labeled_paths,
               const std::vector<std::string> & unlabeled_paths, std::optional<int> batch_size)
{
  const PipelineConfig cfg = resolve_config(g);
  std::vector<std::string> labeled, unlabeled;
  for (const auto & p : labeled_paths) {
    auto ids = scene_ids_of(p);
    labeled.insert(labeled.end(), ids.begin(), ids.end());
  }
  for (const auto & p : unlabeled_paths) {
    auto ids = scene_ids_of(p);
    unlabeled.insert(unlabeled.end(), ids.begin(), ids.end());
  }
  const BatchManifest m =
    export_training_set(labeled, unlabeled, batch_size.value_or(cfg.batch_size), cfg.manifest_seed);
  std::cout << "manifest.jsonl " << write_manifest(cfg.output_dir / "manifest.jsonl", m) << '\n';
  return kExitOk;
}

}  // namespace

int cli_dispatch(const std::vector<std::string> & args)
{
  CLI::App app{"Trajectory-forecast refinement of 3D detection pseudo-labels", "trajlabel"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file mirroring the pipeline settings");
  app.add_option("--seed", g.seed, "Random seed (simulation and manifest shuffling)");
  app.add_option("--jobs", g.jobs, "Scene-level worker threads");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  std::optional<int> n_scenes, n_frames, n_agents, batch_size;
  int n_labeled = 0;
  std::string scene_path, track_path, forecast_path, label_path, gt_path;
  std::vector<std::string> scene_paths, labeled_paths, unlabeled_paths;

  auto * sim = app.add_subcommand("simulate", "Generate synthetic scenes, truth and sidecar");
  sim->add_option("--scenes", n_scenes, "Number of scenes");
  sim->add_option("--frames", n_frames, "Frames per scene");
  sim->add_option("--agents", n_agents, "Agents per scene");
  sim->add_option("--labeled", n_labeled, "Extra labeled scenes written to labeled.jsonl");

  auto * track = app.add_subcommand("track", "Link pseudo-labels into tracks");
  track->add_option("--scenes", scene_path, "Scene file")->required();

  auto * forecast = app.add_subcommand("forecast", "Forecast tracks into future frames");
  forecast->add_option("--scenes", scene_path, "Scene file")->required();
  forecast->add_option("--tracks", track_path, "Tracks file")->required();

  auto * enhance = app.add_subcommand("enhance", "Weight pseudo-labels and insert forecasts");
  enhance->add_option("--scenes", scene_path, "Scene file")->required();
  enhance->add_option("--forecasts", forecast_path, "Forecast file")->required();

  auto * eval = app.add_subcommand("eval", "Score labels against ground truth");
  eval->add_option("--labels", label_path, "Scene file or enhanced file")->required();
  eval->add_option("--gt", gt_path, "Ground-truth sidecar")->required();

  auto * pipe = app.add_subcommand("pipeline", "Run filter, track, forecast, enhance, eval");
  pipe->add_option("--scenes", scene_paths, "Scene files")->required();
  pipe->add_option("--gt", gt_path, "Ground-truth sidecar (optional)");

  auto * exp = app.add_subcommand("export", "Write a 1:1 labeled/unlabeled batch manifest");
  exp->add_option("--labeled", labeled_paths, "Labeled scene files")->required();
  exp->add_option("--unlabeled", unlabeled_paths, "Enhanced or scene files")->required();
  exp->add_option("--batch-size", batch_size, "Scenes per batch (even)");

  std::vector<std::string> argv_store{"trajlabel"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (std::string & s : argv_store) {
    argv.push_back(s.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitValidation;
  }

  fs::path current;
  try {
    if (*sim) {
      return cmd_simulate(g, n_scenes, n_frames, n_agents, n_labeled);
    }
    if (*track) {
      current = scene_path;
      return cmd_track(g, scene_path);
    }
    if (*forecast) {
      current = scene_path;
      return cmd_forecast(g, scene_path, track_path);
    }
    if (*enhance) {
      current = scene_path;
      return cmd_enhance(g, scene_path, forecast_path);
    }
    if (*eval) {
      current = label_path;
      return cmd_eval(g, label_path, gt_path);
    }
    if (*pipe) {
      return cmd_pipeline(g, scene_paths, gt_path);
    }
    if (*exp) {
      return cmd_export(g, labeled_paths, unlabeled_paths, batch_size);
    }
  } catch (const FormatError & e) {
    std::cerr << "error: " << (current.empty() ? std::string(e.what()) : with_path(current, e)) << '\n';
    return kExitValidation;
  } catch (const ConfigError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace trajlabel
