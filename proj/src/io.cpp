// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <utility>

namespace trajlabel
{

using nlohmann::json;

FormatError::FormatError(const std::string & what, std::size_t line)
: std::runtime_error(what), line_(line)
{
}

struct ContentDigest::Impl
{
  EVP_MD_CTX * ctx = nullptr;
};

ContentDigest::ContentDigest() : impl_(std::make_unique<Impl>())
{
  impl_->ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
}

ContentDigest::~ContentDigest() { EVP_MD_CTX_free(impl_->ctx); }

void ContentDigest::update(const std::string & bytes)
{
  EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
}

std::string ContentDigest::hex() const
{
  EVP_MD_CTX * copy = EVP_MD_CTX_new();
  EVP_MD_CTX_copy_ex(copy, impl_->ctx);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(copy, md, &len);
  EVP_MD_CTX_free(copy);
  std::string out = "sha256:";
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    out += buf;
  }
  return out;
}

JsonlWriter::JsonlWriter(const std::filesystem::path & path) : path_(path)
{
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
}

JsonlWriter::~JsonlWriter()
{
  if (!finished_ && out_.is_open()) {
    out_.close();
  }
}

void JsonlWriter::write(const json & record)
{
  std::string line = record.dump();
  line += '\n';
  digest_.update(line);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!out_) {
    throw IoError("write failed on '" + path_.string() + "'");
  }
}

std::string JsonlWriter::finish()
{
  const std::string digest = digest_.hex();
  out_ << json{{"digest", digest}}.dump() << '\n';
  out_.close();
  if (!out_) {
    throw IoError("write failed on '" + path_.string() + "'");
  }
  finished_ = true;
  return digest;
}

JsonlReader::JsonlReader(const std::filesystem::path & path) : path_(path)
{
  in_.open(path, std::ios::binary);
  if (!in_) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
}

std::optional<json> JsonlReader::read_record()
{
  std::string line;
  while (!done_ && std::getline(in_, line)) {
    ++line_;
    const std::string raw = line + '\n';
    if (line.empty()) {
      digest_.update(raw);
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error & e) {
      throw FormatError(
        path_.string() + ":" + std::to_string(line_) + ": invalid JSON: " + e.what(), line_);
    }
    if (j.is_object() && j.size() == 1 && j.contains("digest")) {
      if (!j["digest"].is_string() || j["digest"].get<std::string>() != digest_.hex()) {
        throw FormatError(
          path_.string() + ":" + std::to_string(line_) + ": content digest mismatch", line_);
      }
      digest_verified_ = true;
      done_ = true;
      break;
    }
    digest_.update(raw);
    if (!j.is_object()) {
      throw FormatError(
        path_.string() + ":" + std::to_string(line_) + ": expected a JSON object", line_);
    }
    return j;
  }
  if (!done_ && in_.bad()) {
    throw IoError("read failed on '" + path_.string() + "'");
  }
  return std::nullopt;
}

const std::optional<json> & JsonlReader::peek()
{
  if (!has_peek_) {
    peeked_ = read_record();
    peeked_line_ = line_;
    has_peek_ = true;
  }
  return peeked_;
}

std::optional<json> JsonlReader::next()
{
  if (has_peek_) {
    has_peek_ = false;
    record_line_ = peeked_line_;
    return std::move(peeked_);
  }
  auto r = read_record();
  record_line_ = line_;
  return r;
}

std::string read_file_digest(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      last = line;
    }
  }
  try {
    const json j = json::parse(last);
    if (j.is_object() && j.contains("digest") && j["digest"].is_string()) {
      return j["digest"].get<std::string>();
    }
  } catch (const json::parse_error &) {
  }
  throw FormatError("'" + path.string() + "' has no digest line", 0);
}

namespace
{

[[noreturn]] void fail(const std::string & msg, std::size_t line)
{
  throw FormatError("line " + std::to_string(line) + ": " + msg, line);
}

double get_double(const json & j, const char * key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    fail(std::string("missing or non-numeric field '") + key + "'", line);
  }
  return it->get<double>();
}

std::int64_t get_int(const json & j, const char * key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    fail(std::string("missing or non-integer field '") + key + "'", line);
  }
  return it->get<std::int64_t>();
}

std::string get_string(const json & j, const char * key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    fail(std::string("missing or non-string field '") + key + "'", line);
  }
  return it->get<std::string>();
}

const json & get_array(const json & j, const char * key, std::size_t line)
{
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    fail(std::string("missing or non-array field '") + key + "'", line);
  }
  return *it;
}

void check_version(const json & header, std::size_t line)
{
  const auto v = get_int(header, "format_version", line);
  if (v != kFormatVersion) {
    fail("unsupported format_version " + std::to_string(v), line);
  }
}

json block_header(const std::string & kind, const std::string & scene_id, std::size_t n)
{
  return json{{"kind", kind}, {"scene_id", scene_id}, {"n_records", n},
              {"format_version", kFormatVersion}};
}

// Reads a block header of the given kind, returning (scene_id, n_records).
std::optional<std::pair<std::string, std::size_t>> read_block_header(
  JsonlReader & in, const std::string & kind)
{
  auto header = in.next();
  if (!header) {
    return std::nullopt;
  }
  const std::size_t line = in.last_line();
  if (get_string(*header, "kind", line) != kind) {
    fail("expected a '" + kind + "' block header", line);
  }
  check_version(*header, line);
  const auto n = get_int(*header, "n_records", line);
  if (n < 0) {
    fail("negative n_records", line);
  }
  return std::make_pair(get_string(*header, "scene_id", line), static_cast<std::size_t>(n));
}

json record_or_fail(JsonlReader & in, const std::string & what)
{
  auto r = in.next();
  if (!r) {
    fail("unexpected end of file inside " + what, in.line());
  }
  return std::move(*r);
}

std::string origin_name(LabelOrigin o) { return o == LabelOrigin::Teacher ? "teacher" : "inserted"; }

ForecastSet forecast_set_from_json(const json & rec, std::size_t line)
{
  ForecastSet s;
  s.context_frame = static_cast<int>(get_int(rec, "context_frame", line));
  s.target_frame = static_cast<int>(get_int(rec, "target_frame", line));
  if (s.target_frame <= s.context_frame) {
    fail("target_frame must be after context_frame", line);
  }
  for (const json & b : get_array(rec, "boxes", line)) {
    if (!b.is_object()) {
      fail("forecast box must be an object", line);
    }
    auto it = b.find("box");
    if (it == b.end()) {
      fail("forecast entry missing 'box'", line);
    }
    s.boxes.push_back({get_int(b, "track_id", line), box_from_json(*it, line)});
  }
  return s;
}

}  // namespace

json box_to_json(const Box3D & b)
{
  // Subscript assignment avoids the element copies of initializer-list construction; this
  // is the hottest path in every writer.
  json j = json::object();
  j["x"] = b.x;
  j["y"] = b.y;
  j["z"] = b.z;
  j["l"] = b.l;
  j["w"] = b.w;
  j["h"] = b.h;
  j["yaw"] = b.yaw;
  j["class_id"] = b.class_id;
  j["score"] = b.score;
  j["vx"] = b.vx;
  j["vy"] = b.vy;
  return j;
}

Box3D box_from_json(const json & j, std::size_t line)
{
  if (!j.is_object()) {
    fail("box must be an object", line);
  }
  Box3D b;
  b.x = get_double(j, "x", line);
  b.y = get_double(j, "y", line);
  b.z = get_double(j, "z", line);
  b.l = get_double(j, "l", line);
  b.w = get_double(j, "w", line);
  b.h = get_double(j, "h", line);
  b.yaw = normalize_yaw(get_double(j, "yaw", line));
  b.class_id = static_cast<ClassId>(get_int(j, "class_id", line));
  b.score = get_double(j, "score", line);
  b.vx = get_double(j, "vx", line);
  b.vy = get_double(j, "vy", line);
  std::vector<std::string> problems;
  validate_box(b, "line " + std::to_string(line), problems);
  if (!problems.empty()) {
    throw FormatError(problems.front(), line);
  }
  return b;
}

void write_scene(JsonlWriter & out, const Scene & scene)
{
  out.write(json{{"scene_id", scene.scene_id}, {"dt", scene.dt}, {"labeled", scene.labeled},
                 {"n_frames", scene.frames.size()}, {"format_version", kFormatVersion}});
  for (const Frame & f : scene.frames) {
    json boxes = json::array();
    for (const Box3D & b : f.boxes) {
      boxes.push_back(box_to_json(b));
    }
    out.write(json{{"frame_index", f.frame_index}, {"timestamp", f.timestamp},
                   {"boxes", std::move(boxes)}});
  }
}

std::optional<Scene> read_scene(JsonlReader & in)
{
  auto header = in.next();
  if (!header) {
    return std::nullopt;
  }
  const std::size_t hline = in.last_line();
  check_version(*header, hline);
  Scene scene;
  scene.scene_id = get_string(*header, "scene_id", hline);
  scene.dt = get_double(*header, "dt", hline);
  auto lab = header->find("labeled");
  if (lab == header->end() || !lab->is_boolean()) {
    fail("missing or non-boolean field 'labeled'", hline);
  }
  scene.labeled = lab->get<bool>();
  const auto n = get_int(*header, "n_frames", hline);
  if (n < 0) {
    fail("negative n_frames", hline);
  }
  scene.frames.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const json rec = record_or_fail(in, "scene '" + scene.scene_id + "'");
    const std::size_t line = in.last_line();
    Frame f;
    f.scene_id = scene.scene_id;
    f.frame_index = static_cast<int>(get_int(rec, "frame_index", line));
    f.timestamp = get_double(rec, "timestamp", line);
    const json & boxes = get_array(rec, "boxes", line);
    f.boxes.reserve(boxes.size());
    for (const json & b : boxes) {
      f.boxes.push_back(box_from_json(b, line));
    }
    scene.frames.push_back(std::move(f));
  }
  const auto problems = validate_scene(scene);
  if (!problems.empty()) {
    fail(problems.front(), hline);
  }
  return scene;
}

std::vector<Scene> read_all_scenes(const std::filesystem::path & path)
{
  JsonlReader in(path);
  std::vector<Scene> out;
  while (auto s = read_scene(in)) {
    out.push_back(std::move(*s));
  }
  return out;
}

void write_tracks(JsonlWriter & out, const std::string & scene_id, std::span<const Track> tracks)
{
  out.write(block_header("tracks", scene_id, tracks.size()));
  for (const Track & t : tracks) {
    json links = json::array();
    for (const TrackLink & l : t.links) {
      json rec = json::object();
      rec["frame_index"] = l.frame_index;
      rec["box"] = box_to_json(l.box);
      links.push_back(std::move(rec));
    }
    out.write(json{{"track_id", t.track_id}, {"class_id", t.class_id}, {"links", std::move(links)}});
  }
}

std::optional<TrackBlock> read_tracks(JsonlReader & in)
{
  auto header = read_block_header(in, "tracks");
  if (!header) {
    return std::nullopt;
  }
  TrackBlock block;
  block.scene_id = header->first;
  for (std::size_t i = 0; i < header->second; ++i) {
    const json rec = record_or_fail(in, "tracks block");
    const std::size_t line = in.last_line();
    Track t;
    t.track_id = get_int(rec, "track_id", line);
    t.class_id = static_cast<ClassId>(get_int(rec, "class_id", line));
    for (const json & l : get_array(rec, "links", line)) {
      if (!l.is_object() || !l.contains("box")) {
        fail("track link must be an object with a 'box'", line);
      }
      TrackLink link{static_cast<int>(get_int(l, "frame_index", line)), box_from_json(l["box"], line)};
      if (!t.links.empty() && link.frame_index <= t.links.back().frame_index) {
        fail("track links must have strictly increasing frame_index", line);
      }
      if (link.box.class_id != t.class_id) {
        fail("track link class differs from track class", line);
      }
      t.links.push_back(std::move(link));
    }
    block.tracks.push_back(std::move(t));
  }
  return block;
}

void write_forecasts(
  JsonlWriter & out, const std::string & scene_id, std::span<const ForecastSet> sets)
{
  out.write(block_header("forecasts", scene_id, sets.size()));
  for (const ForecastSet & s : sets) {
    json boxes = json::array();
    for (const ForecastBox & fb : s.boxes) {
      json rec = json::object();
      rec["track_id"] = fb.track_id;
      rec["box"] = box_to_json(fb.box);
      boxes.push_back(std::move(rec));
    }
    out.write(json{{"context_frame", s.context_frame}, {"target_frame", s.target_frame},
                   {"boxes", std::move(boxes)}});
  }
}

std::optional<ForecastBlock> read_forecasts(JsonlReader & in)
{
  const auto & first = in.peek();
  if (!first) {
    in.next();
    return std::nullopt;
  }
  if (!first->contains("kind")) {
    // Headerless injection file: every remaining record is a ForecastSet.
    ForecastBlock block;
    while (auto rec = in.next()) {
      block.sets.push_back(forecast_set_from_json(*rec, in.last_line()));
    }
    return block;
  }
  auto header = read_block_header(in, "forecasts");
  ForecastBlock block;
  block.scene_id = header->first;
  for (std::size_t i = 0; i < header->second; ++i) {
    const json rec = record_or_fail(in, "forecasts block");
    block.sets.push_back(forecast_set_from_json(rec, in.last_line()));
  }
  return block;
}

void write_enhanced(
  JsonlWriter & out, const std::string & scene_id, std::span<const EnhancedFrame> frames)
{
  out.write(block_header("enhanced", scene_id, frames.size()));
  for (const EnhancedFrame & f : frames) {
    json labels = json::array();
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
      const WeightedLabel & l = f.labels[i];
      json rec = json::object();
      rec["box"] = box_to_json(l.box);
      rec["weight"] = l.weight;
      rec["origin"] = origin_name(l.origin);
      rec["match_count"] = i < f.match_counts.size() ? f.match_counts[i] : 0;
      if (l.origin == LabelOrigin::Inserted) {
        rec["context_frame"] = l.context_frame;
      }
      labels.push_back(std::move(rec));
    }
    out.write(json{{"frame_index", f.frame_index}, {"labels", std::move(labels)}});
  }
}

std::optional<EnhancedBlock> read_enhanced(JsonlReader & in)
{
  auto header = read_block_header(in, "enhanced");
  if (!header) {
    return std::nullopt;
  }
  EnhancedBlock block;
  block.scene_id = header->first;
  for (std::size_t i = 0; i < header->second; ++i) {
    const json rec = record_or_fail(in, "enhanced block");
    const std::size_t line = in.last_line();
    EnhancedFrame f;
    f.scene_id = block.scene_id;
    f.frame_index = static_cast<int>(get_int(rec, "frame_index", line));
    for (const json & l : get_array(rec, "labels", line)) {
      if (!l.is_object() || !l.contains("box")) {
        fail("label must be an object with a 'box'", line);
      }
      WeightedLabel wl;
      wl.box = box_from_json(l["box"], line);
      wl.weight = get_double(l, "weight", line);
      if (wl.weight < 0.0) {
        fail("negative label weight", line);
      }
      const std::string origin = get_string(l, "origin", line);
      if (origin == "teacher") {
        wl.origin = LabelOrigin::Teacher;
      } else if (origin == "inserted") {
        wl.origin = LabelOrigin::Inserted;
        wl.context_frame = static_cast<int>(get_int(l, "context_frame", line));
        if (!(wl.weight > 0.0 && wl.weight <= 1.0)) {
          fail("inserted label weight must lie in (0, 1]", line);
        }
      } else {
        fail("unknown label origin '" + origin + "'", line);
      }
      f.match_counts.push_back(static_cast<int>(get_int(l, "match_count", line)));
      f.labels.push_back(wl);
    }
    block.frames.push_back(std::move(f));
  }
  return block;
}

void write_ground_truth(JsonlWriter & out, const LabeledScene & truth, const LabeledScene & teacher)
{
  out.write(json{{"kind", "ground_truth"}, {"scene_id", truth.scene.scene_id},
                 {"dt", truth.scene.dt}, {"labeled", truth.scene.labeled},
                 {"n_records", truth.scene.frames.size()},
                 {"format_version", kFormatVersion}});
  for (std::size_t f = 0; f < truth.scene.frames.size(); ++f) {
    const Frame & frame = truth.scene.frames[f];
    json gt = json::array();
    for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
      json rec = json::object();
      rec["agent_id"] = truth.agent_ids[f][b];
      rec["box"] = box_to_json(frame.boxes[b]);
      gt.push_back(std::move(rec));
    }
    json teacher_ids = json::array();
    if (f < teacher.agent_ids.size()) {
      teacher_ids = teacher.agent_ids[f];
    }
    out.write(json{{"frame_index", frame.frame_index}, {"timestamp", frame.timestamp},
                   {"gt", std::move(gt)}, {"teacher_agent_ids", std::move(teacher_ids)}});
  }
}

std::optional<GroundTruthBlock> read_ground_truth(JsonlReader & in)
{
  auto header = in.next();
  if (!header) {
    return std::nullopt;
  }
  const std::size_t hline = in.last_line();
  if (get_string(*header, "kind", hline) != "ground_truth") {
    fail("expected a 'ground_truth' block header", hline);
  }
  check_version(*header, hline);
  GroundTruthBlock block;
  block.truth.scene.scene_id = get_string(*header, "scene_id", hline);
  block.truth.scene.dt = get_double(*header, "dt", hline);
  // Optional so older sidecars still load.
  if (auto lab = header->find("labeled"); lab != header->end() && lab->is_boolean()) {
    block.truth.scene.labeled = lab->get<bool>();
  }
  const auto n = get_int(*header, "n_records", hline);
  for (std::int64_t i = 0; i < n; ++i) {
    const json rec = record_or_fail(in, "ground_truth block");
    const std::size_t line = in.last_line();
    Frame f;
    f.scene_id = block.truth.scene.scene_id;
    f.frame_index = static_cast<int>(get_int(rec, "frame_index", line));
    f.timestamp = get_double(rec, "timestamp", line);
    std::vector<int> ids;
    for (const json & g : get_array(rec, "gt", line)) {
      if (!g.is_object() || !g.contains("box")) {
        fail("gt entry must be an object with a 'box'", line);
      }
      ids.push_back(static_cast<int>(get_int(g, "agent_id", line)));
      f.boxes.push_back(box_from_json(g["box"], line));
    }
    std::vector<int> teacher_ids;
    for (const json & id : get_array(rec, "teacher_agent_ids", line)) {
      if (!id.is_number_integer()) {
        fail("teacher_agent_ids must hold integers", line);
      }
      teacher_ids.push_back(id.get<int>());
    }
    block.truth.scene.frames.push_back(std::move(f));
    block.truth.agent_ids.push_back(std::move(ids));
    block.teacher_agent_ids.push_back(std::move(teacher_ids));
  }
  return block;
}

}  // namespace trajlabel
