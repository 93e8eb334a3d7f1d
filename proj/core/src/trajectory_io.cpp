#include "navcurate/trajectory_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <initializer_list>
#include <limits>
#include <map>

namespace navcurate {

namespace {

// ---- text helpers ----

// Reads a file in large chunks and hands out lines without the trailing
// newline (or "\r\n"). Small iostream reads are slow on some filesystems.
class ChunkedFile {
 public:
  explicit ChunkedFile(const fs::path& path) : path_(path), f_(std::fopen(path.c_str(), "rb")) {
    if (!f_) throw IoError("cannot open '" + path.string() + "' for reading");
  }
  ~ChunkedFile() { std::fclose(f_); }
  ChunkedFile(const ChunkedFile&) = delete;
  ChunkedFile& operator=(const ChunkedFile&) = delete;

  template <class Fn>
  void each_line(Fn&& fn) {
    std::string carry;
    each_chunk([&](std::string_view chunk) {
      while (!chunk.empty()) {
        const auto nl = chunk.find('\n');
        if (nl == std::string_view::npos) {
          carry.append(chunk);
          return;
        }
        if (carry.empty()) {
          fn(strip_cr(chunk.substr(0, nl)));
        } else {
          carry.append(chunk.substr(0, nl));
          fn(strip_cr(carry));
          carry.clear();
        }
        chunk.remove_prefix(nl + 1);
      }
    });
    if (!carry.empty()) fn(strip_cr(carry));
  }

  std::size_t count_newlines() {
    std::size_t n = 0;
    each_chunk([&](std::string_view chunk) { n += static_cast<std::size_t>(std::count(chunk.begin(), chunk.end(), '\n')); });
    return n;
  }

  void each_chunk_into(std::string& out) {
    each_chunk([&](std::string_view chunk) { out.append(chunk); });
  }

 private:
  static std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
  }

  template <class Fn>
  void each_chunk(Fn&& fn) {
    // reused per thread: fresh large buffers cost a page fault per page
    thread_local std::vector<char> buf(std::size_t{1} << 20);
    while (true) {
      const std::size_t n = std::fread(buf.data(), 1, buf.size(), f_);
      if (n > 0) fn(std::string_view(buf.data(), n));
      if (n < buf.size()) break;
    }
    if (std::ferror(f_)) throw IoError("read from '" + path_.string() + "' failed");
  }

  fs::path path_;
  std::FILE* f_;
};

template <class Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  ChunkedFile in(path);
  std::size_t line_no = 0;
  in.each_line([&](std::string_view line) {
    ++line_no;
    if (!line.empty()) fn(line, line_no);
  });
}

template <class T, class Fn>
std::vector<T> parse_lines(const fs::path& path, Fn&& from_line) {
  std::vector<T> out;
  for_each_line(path, [&](std::string_view line, std::size_t n) { out.push_back(from_line(line, n)); });
  return out;
}

template <class T>
void write_lines(std::span<const T> records, const fs::path& path) {
  std::string text;
  for (const auto& r : records) {
    text += to_line(r);
    text += '\n';
  }
  write_text_file(path, text);
}

// ---- strict JSON field access ----

Json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
}

/// Checks that `j` is an object whose keys are all in required ∪ optional and
/// that every required key is present.
void expect_fields(const Json& j, std::size_t line, std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw ParseError("unexpected field '" + key + "'", line);
  }
  for (auto key : required) {
    if (!j.contains(std::string(key))) throw ParseError("missing field '" + std::string(key) + "'", line);
  }
}

const Json& field(const Json& j, std::string_view key) { return j.at(std::string(key)); }

std::string get_string(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw ParseError("field '" + std::string(key) + "' must be a string", line);
  return v.get<std::string>();
}

std::int64_t get_int(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw ParseError("field '" + std::string(key) + "' must be an integer", line);
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ParseError("field '" + std::string(key) + "' is out of range", line);
  }
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned()) throw ParseError("field '" + std::string(key) + "' must be a non-negative integer", line);
  return v.get<std::uint64_t>();
}

double as_double(const Json& v, std::string_view what, std::size_t line) {
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number", line);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(std::string(what) + " must be finite", line);
  return d;
}

double get_double(const Json& j, std::string_view key, std::size_t line) {
  return as_double(field(j, key), "field '" + std::string(key) + "'", line);
}

bool get_bool(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw ParseError("field '" + std::string(key) + "' must be a boolean", line);
  return v.get<bool>();
}

BBox get_bbox(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_array() || v.size() != 4) throw ParseError("field '" + std::string(key) + "' must be [x1, y1, x2, y2]", line);
  BBox box{};
  for (std::size_t i = 0; i < 4; ++i) box[i] = as_double(v[i], "bbox coordinate", line);
  if (box[0] > box[2] || box[1] > box[3]) throw ParseError("bbox requires x1 <= x2 and y1 <= y2", line);
  return box;
}

Json waypoints_to_json(std::span<const EgoWaypoint> w) {
  Json arr = Json::array();
  for (const auto& p : w) arr.push_back(Json::array({p.x, p.y}));
  return arr;
}

std::vector<EgoWaypoint> get_waypoints(const Json& j, std::string_view key, std::size_t line) {
  const Json& v = field(j, key);
  if (!v.is_array()) throw ParseError("field '" + std::string(key) + "' must be a list of [x, y]", line);
  std::vector<EgoWaypoint> out;
  out.reserve(v.size());
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 2) throw ParseError("waypoint must be [x, y]", line);
    out.push_back({as_double(p[0], "waypoint x", line), as_double(p[1], "waypoint y", line)});
  }
  return out;
}

// ---- lenient config access: missing keys keep defaults ----

void expect_config_fields(const Json& j, std::string_view what, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

void read_opt(const Json& j, std::string_view key, double& out) {
  if (j.contains(std::string(key))) out = get_double(j, key, 0);
}
void read_opt(const Json& j, std::string_view key, std::int64_t& out) {
  if (j.contains(std::string(key))) out = get_int(j, key, 0);
}
void read_opt(const Json& j, std::string_view key, std::uint64_t& out) {
  if (j.contains(std::string(key))) out = get_uint(j, key, 0);
}
void read_opt(const Json& j, std::string_view key, std::string& out) {
  if (j.contains(std::string(key))) out = get_string(j, key, 0);
}

Json nullable(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> get_nullable(const Json& j, std::string_view key) {
  const Json& v = field(j, key);
  if (v.is_null()) return std::nullopt;
  return as_double(v, key, 0);
}

}  // namespace

// ---- pose streams ----

namespace {

Pose parse_pose_line(std::string_view line, std::size_t line_no) {
  std::array<double, 8> v{};
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) {
      if (p == end || *p != ' ') throw ParseError("expected 8 space-separated fields", line_no);
      ++p;
    }
    auto [next, ec] = std::from_chars(p, end, v[i]);
    if (ec != std::errc() || next == p) throw ParseError("field " + std::to_string(i + 1) + " is not a number", line_no);
    if (!std::isfinite(v[i])) throw ParseError("field " + std::to_string(i + 1) + " is not finite", line_no);
    p = next;
  }
  if (p != end) throw ParseError("trailing characters after 8 fields", line_no);
  try {
    return Pose(v[0], Eigen::Vector3d(v[1], v[2], v[3]), Eigen::Quaterniond(v[7], v[4], v[5], v[6]));
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

RawTrajectory parse_pose_stream(std::istream& in, std::string id, double fps) {
  RawTrajectory traj;
  traj.id = std::move(id);
  traj.fps = fps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    traj.poses.push_back(parse_pose_line(line, line_no));
  }
  if (in.bad()) throw IoError("read failed");
  validate(traj);
  return traj;
}

RawTrajectory parse_pose_file(const fs::path& path, double fps, std::string id) {
  RawTrajectory traj;
  traj.id = id.empty() ? path.stem().string() : std::move(id);
  traj.fps = fps;
  {
    // a counting pass is much cheaper than growing a vector of millions of poses
    ChunkedFile count(path);
    traj.poses.reserve(count.count_newlines() + 1);
  }
  for_each_pose(path, [&](const Pose& p) { traj.poses.push_back(p); });
  validate(traj);
  return traj;
}

std::int64_t for_each_pose(const fs::path& path, const std::function<void(const Pose&)>& fn) {
  ChunkedFile in(path);
  std::size_t line_no = 0;
  std::int64_t n = 0;
  in.each_line([&](std::string_view line) {
    ++line_no;
    if (line.empty() || line.front() == '#') return;
    fn(parse_pose_line(line, line_no));
    ++n;
  });
  return n;
}

namespace {

void append_pose_line(std::string& out, const Pose& pose) {
  const auto& t = pose.position();
  const auto& q = pose.orientation();
  std::array<char, 32> buf{};
  bool first = true;
  for (double v : {pose.timestamp(), t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w()}) {
    if (!first) out += ' ';
    first = false;
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw IoError("cannot format number");
    out.append(buf.data(), ptr);
  }
}

}  // namespace

std::string format_pose_line(const Pose& pose) {
  std::string line;
  append_pose_line(line, pose);
  return line;
}

void write_pose_file(const fs::path& path, std::span<const Pose> poses) {
  thread_local std::string text;
  text.assign("# timestamp tx ty tz qx qy qz qw\n");
  for (const auto& p : poses) {
    append_pose_line(text, p);
    text += '\n';
  }
  write_text_file(path, text);
}

// ---- records ----

std::string to_line(const DetectionFrame& frame) {
  Json dets = Json::array();
  for (const auto& d : frame.detections) {
    dets.push_back({{"bbox", d.bbox}, {"label", d.label}, {"score", d.score}});
  }
  return Json{{"detections", dets}, {"frame", frame.frame}}.dump();
}

std::string to_line(const LandmarkAnnotation& lm) {
  return Json{{"bbox", lm.bbox},
              {"clip_id", lm.clip_id},
              {"goal_frame", lm.goal_frame},
              {"instruction", lm.instruction},
              {"name", lm.name}}
      .dump();
}

std::string to_line(const TrainingSample& s) {
  return Json{{"arrival", s.arrival},
              {"clip_id", s.clip_id},
              {"history_frames", s.history_frames},
              {"instruction", s.instruction},
              {"sample_id", s.sample_id},
              {"t", s.t},
              {"t_g", s.t_g},
              {"waypoints", waypoints_to_json(s.waypoints)}}
      .dump();
}

std::string to_line(const PredictionRecord& r) {
  Json j{{"ground_truth", waypoints_to_json(r.ground_truth)},
         {"predicted", waypoints_to_json(r.predicted)},
         {"sample_id", r.sample_id}};
  if (r.arrival_label) j["arrival_label"] = *r.arrival_label;
  if (r.predicted_arrival) j["predicted_arrival"] = *r.predicted_arrival;
  return j.dump();
}

DetectionFrame detection_frame_from_line(std::string_view line, std::size_t n) {
  const Json j = parse_json_line(line, n);
  expect_fields(j, n, {"frame", "detections"});
  DetectionFrame frame;
  frame.frame = get_int(j, "frame", n);
  if (frame.frame < 0) throw ParseError("frame must be >= 0", n);
  const Json& dets = j.at("detections");
  if (!dets.is_array()) throw ParseError("field 'detections' must be a list", n);
  for (const auto& d : dets) {
    expect_fields(d, n, {"label", "bbox", "score"});
    Detection det;
    det.label = get_string(d, "label", n);
    det.bbox = get_bbox(d, "bbox", n);
    det.score = get_double(d, "score", n);
    if (det.score < 0.0 || det.score > 1.0) throw ParseError("score must lie in [0, 1]", n);
    frame.detections.push_back(std::move(det));
  }
  return frame;
}

LandmarkAnnotation landmark_from_line(std::string_view line, std::size_t n) {
  const Json j = parse_json_line(line, n);
  expect_fields(j, n, {"clip_id", "goal_frame", "bbox", "name", "instruction"});
  LandmarkAnnotation lm;
  lm.clip_id = get_string(j, "clip_id", n);
  lm.goal_frame = get_int(j, "goal_frame", n);
  if (lm.goal_frame < 0) throw ParseError("goal_frame must be >= 0", n);
  lm.bbox = get_bbox(j, "bbox", n);
  lm.name = get_string(j, "name", n);
  lm.instruction = get_string(j, "instruction", n);
  if (lm.instruction.empty()) {
    throw ValidationError((n ? "line " + std::to_string(n) + ": " : std::string()) + "landmark instruction is empty");
  }
  return lm;
}

TrainingSample sample_from_line(std::string_view line, std::size_t n) {
  const Json j = parse_json_line(line, n);
  expect_fields(j, n, {"sample_id", "clip_id", "instruction", "t", "t_g", "history_frames", "waypoints", "arrival"});
  TrainingSample s;
  s.sample_id = get_string(j, "sample_id", n);
  s.clip_id = get_string(j, "clip_id", n);
  s.instruction = get_string(j, "instruction", n);
  s.t = get_int(j, "t", n);
  s.t_g = get_int(j, "t_g", n);
  const Json& hist = j.at("history_frames");
  if (!hist.is_array()) throw ParseError("field 'history_frames' must be a list", n);
  for (const auto& h : hist) {
    if (!h.is_number_integer()) throw ParseError("history frame must be an integer", n);
    s.history_frames.push_back(h.get<std::int64_t>());
  }
  s.waypoints = get_waypoints(j, "waypoints", n);
  s.arrival = get_bool(j, "arrival", n);
  return s;
}

PredictionRecord prediction_from_line(std::string_view line, std::size_t n) {
  const Json j = parse_json_line(line, n);
  expect_fields(j, n, {"sample_id", "predicted", "ground_truth"}, {"predicted_arrival", "arrival_label"});
  PredictionRecord r;
  r.sample_id = get_string(j, "sample_id", n);
  r.predicted = get_waypoints(j, "predicted", n);
  r.ground_truth = get_waypoints(j, "ground_truth", n);
  if (r.predicted.empty() || r.predicted.size() != r.ground_truth.size()) {
    throw ParseError("predicted and ground_truth must be non-empty and of equal length", n);
  }
  if (j.contains("predicted_arrival")) {
    r.predicted_arrival = get_double(j, "predicted_arrival", n);
    if (*r.predicted_arrival < 0.0 || *r.predicted_arrival > 1.0) {
      throw ParseError("predicted_arrival must lie in [0, 1]", n);
    }
  }
  if (j.contains("arrival_label")) r.arrival_label = get_bool(j, "arrival_label", n);
  return r;
}

std::vector<DetectionFrame> parse_detections(const fs::path& path) {
  std::map<std::int64_t, DetectionFrame> merged;
  for_each_line(path, [&](std::string_view line, std::size_t n) {
    DetectionFrame f = detection_frame_from_line(line, n);
    auto [it, inserted] = merged.try_emplace(f.frame, f);
    if (!inserted) {
      auto& dst = it->second.detections;
      std::move(f.detections.begin(), f.detections.end(), std::back_inserter(dst));
    }
  });
  std::vector<DetectionFrame> out;
  out.reserve(merged.size());
  for (auto& [frame, f] : merged) out.push_back(std::move(f));
  return out;
}

std::vector<LandmarkAnnotation> parse_landmarks(const fs::path& path) {
  return parse_lines<LandmarkAnnotation>(path, landmark_from_line);
}

std::vector<TrainingSample> parse_samples(const fs::path& path) {
  return parse_lines<TrainingSample>(path, sample_from_line);
}

std::vector<PredictionRecord> parse_predictions(const fs::path& path) {
  return parse_lines<PredictionRecord>(path, prediction_from_line);
}

void write_detections(std::span<const DetectionFrame> frames, const fs::path& path) { write_lines(frames, path); }
void write_landmarks(std::span<const LandmarkAnnotation> lms, const fs::path& path) { write_lines(lms, path); }
void write_samples(std::span<const TrainingSample> samples, const fs::path& path) { write_lines(samples, path); }
void write_predictions(std::span<const PredictionRecord> records, const fs::path& path) { write_lines(records, path); }

// ---- reports ----

Json report_to_json(const FilterReport& report) {
  Json verdicts = Json::array();
  for (const auto& v : report.verdicts) {
    Json reasons = Json::array();
    for (auto r : v.reasons) reasons.push_back(std::string(to_string(r)));
    const auto& d = v.diagnostics;
    verdicts.push_back({{"accepted", v.accepted},
                        {"clip_id", v.clip_id},
                        {"diagnostics",
                         {{"crowded_frame_count", d.crowded_frame_count},
                          {"ignored_detection_frames", d.ignored_detection_frames},
                          {"max_divergence_deg",
                           std::isnan(d.max_divergence_deg) ? Json(nullptr) : Json(d.max_divergence_deg)},
                          {"pitch_range_deg", d.pitch_range_deg}}},
                        {"reasons", reasons}});
  }
  const auto clips = static_cast<std::int64_t>(report.verdicts.size());
  const auto accepted = report.accepted_count();
  Json by_reason = Json::object();
  for (auto r : {RejectReason::PitchRange, RejectReason::ViewDivergence, RejectReason::CrowdDensity}) {
    by_reason[std::string(to_string(r))] = report.rejected_count(r);
  }
  return {{"kind", "filter_report"},
          {"counts",
           {{"clips", clips},
            {"accepted", accepted},
            {"rejected", clips - accepted},
            {"rejected_by_reason", by_reason},
            {"unassigned_detection_frames", report.unassigned_detection_frames}}},
          {"verdicts", verdicts}};
}

Json report_to_json(const MetricReport& r) {
  return {{"kind", "metric_report"},
          {"n_samples", r.n_samples},
          {"n_orientation_samples", r.n_orientation_samples},
          {"n_arrival_samples", r.n_arrival_samples},
          {"mean_aoe_deg", nullable(r.mean_aoe_deg)},
          {"mean_maoe_deg", nullable(r.mean_maoe_deg)},
          {"mean_ade_m", r.mean_ade_m},
          {"mean_made_m", r.mean_made_m},
          {"arrival_accuracy", nullable(r.arrival_accuracy)}};
}

FilterReport filter_report_from_json(const Json& doc) {
  expect_fields(doc, 0, {"kind", "counts", "verdicts"});
  if (doc.at("kind") != "filter_report") throw ParseError("document is not a filter report");
  FilterReport report;
  const Json& counts = doc.at("counts");
  expect_fields(counts, 0, {"clips", "accepted", "rejected", "rejected_by_reason", "unassigned_detection_frames"});
  report.unassigned_detection_frames = get_int(counts, "unassigned_detection_frames", 0);
  for (const auto& v : doc.at("verdicts")) {
    expect_fields(v, 0, {"accepted", "clip_id", "diagnostics", "reasons"});
    FilterVerdict verdict;
    verdict.accepted = get_bool(v, "accepted", 0);
    verdict.clip_id = get_string(v, "clip_id", 0);
    const Json& d = v.at("diagnostics");
    expect_fields(d, 0, {"crowded_frame_count", "ignored_detection_frames", "max_divergence_deg", "pitch_range_deg"});
    verdict.diagnostics.crowded_frame_count = get_int(d, "crowded_frame_count", 0);
    verdict.diagnostics.ignored_detection_frames = get_int(d, "ignored_detection_frames", 0);
    verdict.diagnostics.max_divergence_deg =
        get_nullable(d, "max_divergence_deg").value_or(std::numeric_limits<double>::quiet_NaN());
    verdict.diagnostics.pitch_range_deg = get_double(d, "pitch_range_deg", 0);
    for (const auto& r : v.at("reasons")) {
      if (!r.is_string()) throw ParseError("reject reason must be a string");
      verdict.reasons.push_back(parse_reject_reason(r.get<std::string>()));
    }
    if (verdict.accepted != verdict.reasons.empty()) throw ParseError("verdict '" + verdict.clip_id + "' is inconsistent");
    report.verdicts.push_back(std::move(verdict));
  }
  return report;
}

MetricReport metric_report_from_json(const Json& doc) {
  expect_fields(doc, 0,
                {"kind", "n_samples", "n_orientation_samples", "n_arrival_samples", "mean_aoe_deg", "mean_maoe_deg",
                 "mean_ade_m", "mean_made_m", "arrival_accuracy"});
  if (doc.at("kind") != "metric_report") throw ParseError("document is not a metric report");
  MetricReport r;
  r.n_samples = get_int(doc, "n_samples", 0);
  r.n_orientation_samples = get_int(doc, "n_orientation_samples", 0);
  r.n_arrival_samples = get_int(doc, "n_arrival_samples", 0);
  r.mean_aoe_deg = get_nullable(doc, "mean_aoe_deg");
  r.mean_maoe_deg = get_nullable(doc, "mean_maoe_deg");
  r.mean_ade_m = get_double(doc, "mean_ade_m", 0);
  r.mean_made_m = get_double(doc, "mean_made_m", 0);
  r.arrival_accuracy = get_nullable(doc, "arrival_accuracy");
  return r;
}

void write_report(const FilterReport& report, const fs::path& path) { write_json_file(report_to_json(report), path); }
void write_report(const MetricReport& report, const fs::path& path) { write_json_file(report_to_json(report), path); }

FilterReport parse_filter_report(const fs::path& path) { return filter_report_from_json(read_json_file(path)); }

void write_clip_list(std::span<const std::string> ids, const fs::path& path) {
  std::string text;
  for (const auto& id : ids) {
    text += id;
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<std::string> parse_clip_list(const fs::path& path) {
  std::vector<std::string> ids;
  for_each_line(path, [&](std::string_view line, std::size_t n) {
    if (line.find_first_of(" \t\r") != std::string_view::npos) throw ParseError("clip id contains whitespace", n);
    ids.emplace_back(line);
  });
  return ids;
}

// ---- configs ----

Json to_json(const FilterConfig& c) {
  return {{"pitch_range_max_deg", c.pitch_range_max_deg},
          {"divergence_max_deg", c.divergence_max_deg},
          {"window_seconds", c.window_seconds},
          {"min_window_displacement_m", c.min_window_displacement_m},
          {"crowd_count_threshold", c.crowd_count_threshold},
          {"crowd_frame_threshold", c.crowd_frame_threshold},
          {"person_label", c.person_label},
          {"person_score_min", c.person_score_min}};
}

FilterConfig filter_config_from_json(const Json& j) {
  expect_config_fields(j, "filter config",
                       {"pitch_range_max_deg", "divergence_max_deg", "window_seconds", "min_window_displacement_m",
                        "crowd_count_threshold", "crowd_frame_threshold", "person_label", "person_score_min"});
  FilterConfig c;
  read_opt(j, "pitch_range_max_deg", c.pitch_range_max_deg);
  read_opt(j, "divergence_max_deg", c.divergence_max_deg);
  read_opt(j, "window_seconds", c.window_seconds);
  read_opt(j, "min_window_displacement_m", c.min_window_displacement_m);
  read_opt(j, "crowd_count_threshold", c.crowd_count_threshold);
  read_opt(j, "crowd_frame_threshold", c.crowd_frame_threshold);
  read_opt(j, "person_label", c.person_label);
  read_opt(j, "person_score_min", c.person_score_min);
  return c;
}

Json to_json(const SamplerConfig& c) {
  return {{"history_len", c.history_len},       {"horizon", c.horizon},
          {"min_offset", c.min_offset},         {"max_offset", c.max_offset},
          {"arrival_window", c.arrival_window}, {"arrival_fraction", c.arrival_fraction},
          {"waypoint_stride", c.waypoint_stride}, {"draws_per_landmark", c.draws_per_landmark},
          {"seed", c.seed}};
}

SamplerConfig sampler_config_from_json(const Json& j) {
  expect_config_fields(j, "sampler config",
                       {"history_len", "horizon", "min_offset", "max_offset", "arrival_window", "arrival_fraction",
                        "waypoint_stride", "draws_per_landmark", "seed"});
  SamplerConfig c;
  read_opt(j, "history_len", c.history_len);
  read_opt(j, "horizon", c.horizon);
  read_opt(j, "min_offset", c.min_offset);
  read_opt(j, "max_offset", c.max_offset);
  read_opt(j, "arrival_window", c.arrival_window);
  read_opt(j, "arrival_fraction", c.arrival_fraction);
  read_opt(j, "waypoint_stride", c.waypoint_stride);
  read_opt(j, "draws_per_landmark", c.draws_per_landmark);
  read_opt(j, "seed", c.seed);
  return c;
}

Json to_json(const AxisConvention& c) {
  return {{"camera_forward", std::string(to_string(c.camera_forward))}, {"world_up", std::string(to_string(c.world_up))}};
}

AxisConvention axis_convention_from_json(const Json& j) {
  expect_config_fields(j, "axis convention", {"camera_forward", "world_up"});
  AxisConvention c;
  if (j.contains("camera_forward")) c.camera_forward = parse_axis(get_string(j, "camera_forward", 0));
  if (j.contains("world_up")) c.world_up = parse_axis(get_string(j, "world_up", 0));
  return c;
}

Json to_json(const LossWeights& w) {
  return {{"lambda_reg", w.reg}, {"lambda_ori", w.ori}, {"lambda_arr", w.arr}, {"lambda_hall", w.hall}};
}

LossWeights loss_weights_from_json(const Json& j) {
  expect_config_fields(j, "loss weights", {"lambda_reg", "lambda_ori", "lambda_arr", "lambda_hall"});
  LossWeights w;
  read_opt(j, "lambda_reg", w.reg);
  read_opt(j, "lambda_ori", w.ori);
  read_opt(j, "lambda_arr", w.arr);
  read_opt(j, "lambda_hall", w.hall);
  return w;
}

Json to_json(const SynthSpec& s) {
  Json segments = Json::array();
  for (const auto& piece : s.segments) segments.push_back(to_json(piece));
  return {{"id", s.id},
          {"kind", std::string(to_string(s.kind))},
          {"duration_s", s.duration_s},
          {"fps", s.fps},
          {"speed_mps", s.speed_mps},
          {"start_yaw_deg", s.start_yaw_deg},
          {"yaw_rate_deg_s", s.yaw_rate_deg_s},
          {"amplitude_deg", s.amplitude_deg},
          {"period_s", s.period_s},
          {"turn_deg", s.turn_deg},
          {"turn_start_s", s.turn_start_s},
          {"turn_len_s", s.turn_len_s},
          {"turn_ramp_s", s.turn_ramp_s},
          {"position_noise_m", s.position_noise_m},
          {"seed", s.seed},
          {"segments", segments}};
}

SynthSpec synth_spec_from_json(const Json& j) {
  expect_config_fields(j, "synth spec",
                       {"id", "kind", "duration_s", "fps", "speed_mps", "start_yaw_deg", "yaw_rate_deg_s",
                        "amplitude_deg", "period_s", "turn_deg", "turn_start_s", "turn_len_s", "turn_ramp_s",
                        "position_noise_m", "seed", "segments"});
  SynthSpec s;
  read_opt(j, "id", s.id);
  if (j.contains("kind")) s.kind = parse_synth_kind(get_string(j, "kind", 0));
  read_opt(j, "duration_s", s.duration_s);
  read_opt(j, "fps", s.fps);
  read_opt(j, "speed_mps", s.speed_mps);
  read_opt(j, "start_yaw_deg", s.start_yaw_deg);
  read_opt(j, "yaw_rate_deg_s", s.yaw_rate_deg_s);
  read_opt(j, "amplitude_deg", s.amplitude_deg);
  read_opt(j, "period_s", s.period_s);
  read_opt(j, "turn_deg", s.turn_deg);
  read_opt(j, "turn_start_s", s.turn_start_s);
  read_opt(j, "turn_len_s", s.turn_len_s);
  read_opt(j, "turn_ramp_s", s.turn_ramp_s);
  read_opt(j, "position_noise_m", s.position_noise_m);
  read_opt(j, "seed", s.seed);
  if (j.contains("segments")) {
    const Json& segs = j.at("segments");
    if (!segs.is_array()) throw ParseError("synth spec: 'segments' must be a list");
    for (const auto& piece : segs) s.segments.push_back(synth_spec_from_json(piece));
  }
  return s;
}

Json to_json(const SynthBundleSpec& b) {
  Json crowd = Json::array();
  for (const auto& run : b.crowd) {
    crowd.push_back({{"start_frame", run.start_frame}, {"frames", run.frames}, {"count", run.count}});
  }
  return {{"trajectory", to_json(b.trajectory)},
          {"crowd", crowd},
          {"clip_seconds", b.clip_seconds},
          {"landmarks_per_clip", b.landmarks_per_clip},
          {"landmark_seed", b.landmark_seed}};
}

SynthBundleSpec synth_bundle_spec_from_json(const Json& j) {
  SynthBundleSpec b;
  if (!j.is_object() || !j.contains("trajectory")) {
    b.trajectory = synth_spec_from_json(j);
    return b;
  }
  expect_config_fields(j, "synth bundle", {"trajectory", "crowd", "clip_seconds", "landmarks_per_clip", "landmark_seed"});
  b.trajectory = synth_spec_from_json(j.at("trajectory"));
  if (j.contains("crowd")) {
    const Json& runs = j.at("crowd");
    if (!runs.is_array()) throw ParseError("synth bundle: 'crowd' must be a list");
    for (const auto& r : runs) {
      expect_fields(r, 0, {"start_frame", "frames", "count"});
      b.crowd.push_back({get_int(r, "start_frame", 0), get_int(r, "frames", 0), get_int(r, "count", 0)});
    }
  }
  read_opt(j, "clip_seconds", b.clip_seconds);
  read_opt(j, "landmarks_per_clip", b.landmarks_per_clip);
  read_opt(j, "landmark_seed", b.landmark_seed);
  return b;
}

// ---- documents ----

Json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const Json& doc, const fs::path& path) { write_text_file(path, dump_document(doc)); }

std::string read_text_file(const fs::path& path) {
  std::string text;
  ChunkedFile(path).each_chunk_into(text);
  return text;
}

void write_text_file(const fs::path& path, std::string_view contents) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  const bool ok = std::fwrite(contents.data(), 1, contents.size(), f) == contents.size();
  if (std::fclose(f) != 0 || !ok) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace navcurate
