#include "commands.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <cctype>
#include <map>
#include <set>

#include <navcurate/eval_metrics.hpp>
#include <navcurate/loss_kernels.hpp>
#include <navcurate/parallel.hpp>
#include <navcurate/segmentation.hpp>
#include <navcurate/synth_gen.hpp>

namespace navcurate::cli {

namespace {

constexpr const char* kClipManifest = "manifest.json";

std::string generic(const fs::path& p) { return p.generic_string(); }

fs::path relative_to(const fs::path& target, const fs::path& base) {
  const fs::path rel = target.lexically_normal().lexically_relative(base.lexically_normal());
  return rel.empty() ? target.filename() : rel;
}

Json digest_entry(const fs::path& shown, const fs::path& actual) {
  return {{"path", generic(shown)}, {"sha256", sha256_file(actual)}};
}

Json tool_info() { return {{"name", kToolName}, {"version", kToolVersion}}; }

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_directory(file.parent_path());
}

// ---- clip directories ----

struct ClipDirectory {
  std::vector<Clip> clips;
  fs::path manifest;
};

ClipDirectory read_clip_directory(const fs::path& dir, unsigned workers) {
  ClipDirectory out;
  out.manifest = dir / kClipManifest;
  const Json manifest = read_json_file(out.manifest);
  if (!manifest.is_object() || manifest.value("stage", "") != "segment" || !manifest.contains("clips")) {
    throw ParseError("'" + out.manifest.string() + "' is not a segment manifest");
  }
  const Json& entries = manifest.at("clips");
  out.clips.resize(entries.size());
  parallel_for(entries.size(), workers, [&](std::size_t i) {
    const Json& e = entries[i];
    try {
      const auto id = e.at("clip_id").get<std::string>();
      const double fps = e.at("fps").get<double>();
      RawTrajectory poses = parse_pose_file(dir / e.at("file").get<std::string>(), fps, id);
      Clip clip;
      clip.clip_id = id;
      clip.source_id = e.at("source_id").get<std::string>();
      clip.fps = fps;
      clip.start_frame = e.at("start_frame").get<std::int64_t>();
      clip.poses = std::move(poses.poses);
      const Json& q = e.at("anchor_orientation");
      if (!q.is_array() || q.size() != 4) throw ParseError("clip '" + id + "': anchor_orientation must be [qx, qy, qz, qw]");
      clip.anchor_orientation = Pose(0.0, Eigen::Vector3d::Zero(),
                                     Eigen::Quaterniond(q[3].get<double>(), q[0].get<double>(), q[1].get<double>(),
                                                        q[2].get<double>()))
                                    .orientation();
      if (clip.size() != e.at("frames").get<std::int64_t>()) {
        throw ValidationError("clip '" + id + "' frame count differs from its manifest entry");
      }
      out.clips[i] = std::move(clip);
    } catch (const Json::exception& ex) {
      throw ParseError("'" + out.manifest.string() + "': bad clip entry: " + ex.what());
    }
  });
  return out;
}

// ---- config ----

struct FilterOverrides {
  std::optional<double> pitch_range_max_deg, divergence_max_deg, window_seconds, min_window_displacement_m;
  std::optional<std::int64_t> crowd_count_threshold, crowd_frame_threshold;
  std::optional<std::string> person_label;
  std::optional<double> person_score_min;

  void apply(FilterConfig& c) const {
    if (pitch_range_max_deg) c.pitch_range_max_deg = *pitch_range_max_deg;
    if (divergence_max_deg) c.divergence_max_deg = *divergence_max_deg;
    if (window_seconds) c.window_seconds = *window_seconds;
    if (min_window_displacement_m) c.min_window_displacement_m = *min_window_displacement_m;
    if (crowd_count_threshold) c.crowd_count_threshold = *crowd_count_threshold;
    if (crowd_frame_threshold) c.crowd_frame_threshold = *crowd_frame_threshold;
    if (person_label) c.person_label = *person_label;
    if (person_score_min) c.person_score_min = *person_score_min;
  }
};

struct SamplerOverrides {
  std::optional<std::int64_t> history_len, horizon, min_offset, max_offset, arrival_window, waypoint_stride,
      draws_per_landmark;
  std::optional<double> arrival_fraction;
  std::optional<std::uint64_t> seed;

  void apply(SamplerConfig& c) const {
    if (history_len) c.history_len = *history_len;
    if (horizon) c.horizon = *horizon;
    if (min_offset) c.min_offset = *min_offset;
    if (max_offset) c.max_offset = *max_offset;
    if (arrival_window) c.arrival_window = *arrival_window;
    if (waypoint_stride) c.waypoint_stride = *waypoint_stride;
    if (draws_per_landmark) c.draws_per_landmark = *draws_per_landmark;
    if (arrival_fraction) c.arrival_fraction = *arrival_fraction;
    if (seed) c.seed = *seed;
  }
};

struct ConventionOverrides {
  std::optional<std::string> camera_forward, world_up;

  void apply(AxisConvention& c) const {
    if (camera_forward) c.camera_forward = parse_axis(*camera_forward);
    if (world_up) c.world_up = parse_axis(*world_up);
  }
};

Json loss_input_waypoints_to_json(const std::vector<Eigen::Vector2d>& g) {
  Json arr = Json::array();
  for (const auto& v : g) arr.push_back(Json::array({v.x(), v.y()}));
  return arr;
}

std::vector<EgoWaypoint> waypoints_from(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) throw ParseError(std::string("loss input: '") + key + "' must be a list of [x, y]");
  std::vector<EgoWaypoint> out;
  for (const auto& p : doc.at(key)) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ParseError(std::string("loss input: '") + key + "' entries must be [x, y]");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

FeatureSeq features_from(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) throw ParseError(std::string("loss input: '") + key + "' must be a k x d list");
  const Json& rows = doc.at(key);
  const std::size_t k = rows.size();
  const std::size_t d = k ? rows[0].size() : 0;
  FeatureSeq m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < k; ++i) {
    if (!rows[i].is_array() || rows[i].size() != d) {
      throw Error(ErrorKind::ShapeMismatch, std::string("loss input: '") + key + "' rows differ in length");
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!rows[i][j].is_number()) throw ParseError(std::string("loss input: '") + key + "' must hold numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

fs::path default_accepted_path(const fs::path& report) {
  fs::path p = report;
  p.replace_extension(".accepted.txt");
  return p;
}

std::vector<FilterVerdict> verdicts_from_accepted(const fs::path& path, std::span<const Clip> clips) {
  std::set<std::string> accepted;
  bool from_report = false;
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open '" + path.string() + "' for reading");
    char c = 0;
    while (probe.get(c) && std::isspace(static_cast<unsigned char>(c))) {}
    from_report = c == '{';
  }
  if (from_report) {
    for (const auto& v : parse_filter_report(path).verdicts) {
      if (v.accepted) accepted.insert(v.clip_id);
    }
  } else {
    for (auto& id : parse_clip_list(path)) accepted.insert(std::move(id));
  }

  std::set<std::string> known;
  for (const auto& c : clips) known.insert(c.clip_id);
  for (const auto& id : accepted) {
    if (!known.count(id)) throw ValidationError("accepted clip '" + id + "' is not in the clip directory");
  }
  std::vector<FilterVerdict> verdicts;
  for (const auto& c : clips) {
    FilterVerdict v;
    v.clip_id = c.clip_id;
    v.accepted = accepted.count(c.clip_id) > 0;
    if (!v.accepted) v.reasons.push_back(RejectReason::PitchRange);  // placeholder; only acceptance matters here
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::InvalidSpec:
    case ErrorKind::LengthMismatch:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::GimbalDegenerate:
    case ErrorKind::AllUndefined:
    case ErrorKind::OutOfBounds:
    case ErrorKind::Infeasible:
    case ErrorKind::TooShort:
      return 2;
    case ErrorKind::EmptyResult:
    case ErrorKind::EmptyInput:
      return 3;
    case ErrorKind::Io:
      return 4;
  }
  return 1;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read from '" + path.string() + "' failed");
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  hex.reserve(2 * len);
  static constexpr char kHex[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xf];
  }
  return hex;
}

fs::path manifest_path_for(const fs::path& output_file) {
  fs::path p = output_file;
  p.replace_extension(".manifest.json");
  return p;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  const Json doc = read_json_file(path);
  if (!doc.is_object()) throw ParseError("config '" + path.string() + "' must be a JSON object");
  PipelineConfig cfg;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "filter") {
      cfg.filter = filter_config_from_json(it.value());
    } else if (it.key() == "sampler") {
      cfg.sampler = sampler_config_from_json(it.value());
    } else if (it.key() == "convention") {
      cfg.convention = axis_convention_from_json(it.value());
    } else {
      throw ParseError("config '" + path.string() + "': unknown section '" + it.key() + "'");
    }
  }
  return cfg;
}

// ---- stages ----

Json run_segment(const SegmentOptions& o) {
  const std::string source_id = o.id.empty() ? o.input.stem().string() : o.id;
  ClipStream stream(source_id, o.fps, o.clip_seconds);
  ensure_directory(o.out_dir);

  // Clips are written in small batches as the input streams past, so memory
  // stays at a few clips no matter how long the trajectory is.
  Json entries = Json::array();
  Json outputs = Json::array();
  std::vector<Clip> batch;
  const std::size_t batch_size = 4 * std::max(1u, o.workers);
  auto flush = [&] {
    std::vector<Json> digests(batch.size());
    parallel_for(batch.size(), o.workers, [&](std::size_t i) {
      const std::string file = batch[i].clip_id + ".txt";
      write_pose_file(o.out_dir / file, batch[i].poses);
      digests[i] = digest_entry(file, o.out_dir / file);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Clip& clip = batch[i];
      const auto& q = clip.anchor_orientation;
      entries.push_back({{"anchor_orientation", Json::array({q.x(), q.y(), q.z(), q.w()})},
                         {"clip_id", clip.clip_id},
                         {"file", clip.clip_id + ".txt"},
                         {"fps", clip.fps},
                         {"frames", clip.size()},
                         {"source_id", clip.source_id},
                         {"start_frame", clip.start_frame}});
      outputs.push_back(std::move(digests[i]));
    }
    batch.clear();
  };
  for_each_pose(o.input, [&](const Pose& p) {
    if (auto clip = stream.push(p)) {
      batch.push_back(std::move(*clip));
      if (batch.size() == batch_size) flush();
    }
  });
  stream.finish();
  flush();

  const std::int64_t frames = stream.frames_seen();
  const std::int64_t clips = stream.clips_emitted();
  const std::int64_t used = clips * stream.clip_frames();
  const Json counts{{"frames_in", frames}, {"clips", clips}, {"frames_dropped", frames - used}};
  const Json manifest{{"tool", tool_info()},
                      {"stage", "segment"},
                      {"parameters",
                       {{"input", generic(o.input)}, {"fps", o.fps}, {"clip_seconds", o.clip_seconds}, {"id", source_id}}},
                      {"config", Json::object()},
                      {"inputs", Json::array({digest_entry(o.input, o.input)})},
                      {"outputs", outputs},
                      {"clips", entries},
                      {"counts", counts}};
  write_json_file(manifest, o.out_dir / kClipManifest);
  return {{"stage", "segment"}, {"counts", counts}};
}

Json run_filter(const FilterOptions& o) {
  o.config.validate();
  const ClipDirectory dir = read_clip_directory(o.clips_dir, o.workers);
  std::vector<DetectionFrame> detections;
  if (o.detections) detections = parse_detections(*o.detections);

  const FilterReport report = filter_clips(dir.clips, detections, o.config, o.convention, o.workers);
  const fs::path accepted_path = o.accepted_out.value_or(default_accepted_path(o.report));
  ensure_parent(o.report);
  ensure_parent(accepted_path);
  write_report(report, o.report);
  const auto accepted_ids = report.accepted_clip_ids();
  write_clip_list(accepted_ids, accepted_path);

  const fs::path root = o.report.parent_path();
  Json inputs = Json::array({digest_entry(dir.manifest, dir.manifest)});
  if (o.detections) inputs.push_back(digest_entry(*o.detections, *o.detections));

  Json by_reason = Json::object();
  for (auto r : {RejectReason::PitchRange, RejectReason::ViewDivergence, RejectReason::CrowdDensity}) {
    by_reason[std::string(to_string(r))] = report.rejected_count(r);
  }
  const auto in = static_cast<std::int64_t>(report.verdicts.size());
  const Json counts{{"clips_in", in},
                    {"accepted", report.accepted_count()},
                    {"rejected", in - report.accepted_count()},
                    {"rejected_by_reason", by_reason}};
  const Json manifest{
      {"tool", tool_info()},
      {"stage", "filter"},
      {"parameters",
       {{"clips_dir", generic(o.clips_dir)},
        {"detections", o.detections ? Json(generic(*o.detections)) : Json(nullptr)},
        {"report", generic(relative_to(o.report, root))},
        {"accepted", generic(relative_to(accepted_path, root))}}},
      {"config", {{"filter", to_json(o.config)}, {"convention", to_json(o.convention)}}},
      {"inputs", inputs},
      {"outputs",
       Json::array({digest_entry(relative_to(o.report, root), o.report),
                    digest_entry(relative_to(accepted_path, root), accepted_path)})},
      {"counts", counts}};
  write_json_file(manifest, manifest_path_for(o.report));
  return {{"stage", "filter"}, {"counts", counts}};
}

Json run_samples(const SamplesOptions& o) {
  o.config.validate();
  const ClipDirectory dir = read_clip_directory(o.clips_dir, o.workers);
  const auto landmarks = parse_landmarks(o.landmarks);
  const auto verdicts = verdicts_from_accepted(o.accepted, dir.clips);

  std::map<std::string, const Clip*> by_id;
  for (const auto& c : dir.clips) by_id[c.clip_id] = &c;
  for (const auto& lm : landmarks) {
    if (auto it = by_id.find(lm.clip_id); it != by_id.end()) validate_landmark(lm, *it->second);
  }

  const Corpus corpus = build_corpus(dir.clips, landmarks, verdicts, o.config, o.convention, o.workers);
  ensure_parent(o.out);
  write_samples(corpus.samples, o.out);

  const fs::path root = o.out.parent_path();
  const auto& s = corpus.stats;
  const Json counts{{"accepted_clips", s.accepted_clips},
                    {"landmarks_used", s.landmarks_used},
                    {"landmarks_unknown_clip", s.landmarks_unknown_clip},
                    {"landmarks_rejected_clip", s.landmarks_rejected_clip},
                    {"skipped_infeasible", s.skipped_infeasible},
                    {"skipped_out_of_bounds", s.skipped_out_of_bounds},
                    {"skipped_gimbal", s.skipped_gimbal},
                    {"arrival_samples", s.arrival_samples},
                    {"samples", s.samples}};
  const Json manifest{
      {"tool", tool_info()},
      {"stage", "samples"},
      {"parameters",
       {{"clips_dir", generic(o.clips_dir)},
        {"landmarks", generic(o.landmarks)},
        {"accepted", generic(o.accepted)},
        {"out", generic(relative_to(o.out, root))}}},
      {"config", {{"sampler", to_json(o.config)}, {"convention", to_json(o.convention)}}},
      {"inputs", Json::array({digest_entry(dir.manifest, dir.manifest), digest_entry(o.landmarks, o.landmarks),
                              digest_entry(o.accepted, o.accepted)})},
      {"outputs", Json::array({digest_entry(relative_to(o.out, root), o.out)})},
      {"counts", counts}};
  write_json_file(manifest, manifest_path_for(o.out));
  return {{"stage", "samples"}, {"counts", counts}};
}

Json run_eval(const EvalOptions& o) {
  const auto records = parse_predictions(o.predictions);
  const MetricReport report = evaluate(records, o.workers);
  ensure_parent(o.out);
  write_report(report, o.out);
  const fs::path root = o.out.parent_path();
  const Json manifest{{"tool", tool_info()},
                      {"stage", "eval"},
                      {"parameters", {{"pred", generic(o.predictions)}, {"out", generic(relative_to(o.out, root))}}},
                      {"config", Json::object()},
                      {"inputs", Json::array({digest_entry(o.predictions, o.predictions)})},
                      {"outputs", Json::array({digest_entry(relative_to(o.out, root), o.out)})},
                      {"counts", {{"records", report.n_samples}}}};
  write_json_file(manifest, manifest_path_for(o.out));
  return {{"stage", "eval"}, {"report", report_to_json(report)}};
}

namespace {

Json synth_from_bundle(const SynthBundleSpec& spec, const AxisConvention& convention, const fs::path& out_dir,
                       const Json& input_entries) {
  const SynthBundle bundle = generate_bundle(spec, convention);
  ensure_directory(out_dir);
  const std::string pose_file = bundle.trajectory.id + ".txt";
  write_pose_file(out_dir / pose_file, bundle.trajectory.poses);
  write_detections(bundle.detections, out_dir / "detections.jsonl");
  write_landmarks(bundle.landmarks, out_dir / "landmarks.jsonl");

  const Json counts{{"frames", bundle.trajectory.poses.size()},
                    {"detection_frames", bundle.detections.size()},
                    {"landmarks", bundle.landmarks.size()},
                    {"landmarks_truncated", bundle.truncated_landmarks}};
  const Json manifest{
      {"tool", tool_info()},
      {"stage", "synth"},
      {"parameters", {{"fps", bundle.trajectory.fps}, {"id", bundle.trajectory.id}}},
      {"config", {{"synth", to_json(spec)}, {"convention", to_json(convention)}}},
      {"inputs", input_entries},
      {"outputs", Json::array({digest_entry(pose_file, out_dir / pose_file),
                               digest_entry("detections.jsonl", out_dir / "detections.jsonl"),
                               digest_entry("landmarks.jsonl", out_dir / "landmarks.jsonl")})},
      {"counts", counts}};
  write_json_file(manifest, out_dir / kClipManifest);
  return {{"stage", "synth"}, {"counts", counts}};
}

}  // namespace

Json run_synth(const SynthOptions& o) {
  if (!o.spec) return synth_from_bundle(oracle_corpus_spec(), o.convention, o.out_dir, Json::array());
  const SynthBundleSpec spec = synth_bundle_spec_from_json(read_json_file(*o.spec));
  return synth_from_bundle(spec, o.convention, o.out_dir, Json::array({digest_entry(*o.spec, *o.spec)}));
}

Json run_loss(const LossOptions& o) {
  const Json doc = read_json_file(o.input);
  if (!doc.is_object()) throw ParseError("loss input must be a JSON object");
  static const std::set<std::string> kKeys = {"pred_waypoints", "gt_waypoints", "arrival_logit", "arrival_label",
                                              "pred_features",  "gt_features",  "weights",       "reg_norm",
                                              "eps"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kKeys.count(it.key())) throw ParseError("loss input: unknown field '" + it.key() + "'");
  }

  const auto pred = waypoints_from(doc, "pred_waypoints");
  const auto gt = waypoints_from(doc, "gt_waypoints");
  if (!doc.contains("arrival_logit") || !doc.at("arrival_logit").is_number()) {
    throw ParseError("loss input: 'arrival_logit' must be a number");
  }
  const double logit = doc.at("arrival_logit").get<double>();
  const Json& label_json = doc.contains("arrival_label") ? doc.at("arrival_label") : Json();
  bool label = false;
  if (label_json.is_boolean()) {
    label = label_json.get<bool>();
  } else if (label_json.is_number_integer() && (label_json == 0 || label_json == 1)) {
    label = label_json.get<int>() == 1;
  } else {
    throw ParseError("loss input: 'arrival_label' must be 0, 1, true or false");
  }
  const FeatureSeq pf = features_from(doc, "pred_features");
  const FeatureSeq gf = features_from(doc, "gt_features");
  const LossWeights weights = doc.contains("weights") ? loss_weights_from_json(doc.at("weights")) : LossWeights{};
  weights.validate();

  RegressionNorm norm = RegressionNorm::Squared;
  if (doc.contains("reg_norm")) {
    const auto name = doc.at("reg_norm").get<std::string>();
    if (name == "euclidean") {
      norm = RegressionNorm::Euclidean;
    } else if (name != "squared") {
      throw ParseError("loss input: 'reg_norm' must be \"squared\" or \"euclidean\"");
    }
  }
  const double eps = doc.contains("eps") ? doc.at("eps").get<double>() : 1e-8;

  const WaypointLoss reg = loss_reg(pred, gt, norm);
  const WaypointLoss ori = loss_ori(pred, gt, eps);
  const ScalarLoss arr = loss_arr(logit, label);
  const FeatureLoss hall = loss_hall(pf, gf);
  const LossComponents c{reg.value, ori.value, arr.value, hall.value};

  Json result{{"components", {{"reg", c.reg}, {"ori", c.ori}, {"arr", c.arr}, {"hall", c.hall}}},
              {"weights", to_json(weights)},
              {"total", loss_total(c, weights)}};
  if (o.gradients) {
    result["gradients"] = {{"reg", loss_input_waypoints_to_json(reg.gradient)},
                           {"ori", loss_input_waypoints_to_json(ori.gradient)},
                           {"arr", arr.gradient},
                           {"hall", matrix_to_json(hall.gradient)}};
  }
  return result;
}

Json run_replay(const fs::path& manifest_path, const fs::path& out_root, unsigned workers) {
  const Json m = read_json_file(manifest_path);
  try {
    const auto stage = m.at("stage").get<std::string>();
    const Json& p = m.at("parameters");
    const Json& cfg = m.at("config");
    if (stage == "segment") {
      return run_segment({p.at("input").get<std::string>(), p.at("fps").get<double>(),
                          p.at("clip_seconds").get<double>(), out_root, p.at("id").get<std::string>(), workers});
    }
    if (stage == "filter") {
      FilterOptions o;
      o.clips_dir = p.at("clips_dir").get<std::string>();
      if (!p.at("detections").is_null()) o.detections = fs::path(p.at("detections").get<std::string>());
      o.report = out_root / p.at("report").get<std::string>();
      o.accepted_out = out_root / p.at("accepted").get<std::string>();
      o.config = filter_config_from_json(cfg.at("filter"));
      o.convention = axis_convention_from_json(cfg.at("convention"));
      o.workers = workers;
      return run_filter(o);
    }
    if (stage == "samples") {
      SamplesOptions o;
      o.clips_dir = p.at("clips_dir").get<std::string>();
      o.landmarks = p.at("landmarks").get<std::string>();
      o.accepted = p.at("accepted").get<std::string>();
      o.out = out_root / p.at("out").get<std::string>();
      o.config = sampler_config_from_json(cfg.at("sampler"));
      o.convention = axis_convention_from_json(cfg.at("convention"));
      o.workers = workers;
      return run_samples(o);
    }
    if (stage == "eval") {
      return run_eval({p.at("pred").get<std::string>(), out_root / p.at("out").get<std::string>(), workers});
    }
    if (stage == "synth") {
      const SynthBundleSpec spec = synth_bundle_spec_from_json(cfg.at("synth"));
      return synth_from_bundle(spec, axis_convention_from_json(cfg.at("convention")), out_root, m.at("inputs"));
    }
    throw ParseError("manifest '" + manifest_path.string() + "': unknown stage '" + stage + "'");
  } catch (const Json::exception& e) {
    throw ParseError("manifest '" + manifest_path.string() + "': " + e.what());
  }
}

// ---- command line ----

namespace {

void add_convention_flags(CLI::App* cmd, ConventionOverrides& conv) {
  cmd->add_option("--camera-forward", conv.camera_forward, "Camera forward axis, e.g. +z");
  cmd->add_option("--world-up", conv.world_up, "World up axis, e.g. +z");
}

void add_workers_flag(CLI::App* cmd, unsigned& workers) {
  cmd->add_option("--workers", workers, "Worker threads (default: NAVCURATE_WORKERS or processor count)")
      ->check(CLI::PositiveNumber);
}

void print_error(std::ostream& err, const std::string& command, std::string_view kind, const std::string& message,
                 std::size_t line = 0) {
  Json j{{"command", command}, {"error", kind}, {"message", message}};
  if (line) j["line"] = line;
  err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curate egocentric walking trajectories into navigation training samples and score waypoint predictions",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  unsigned workers = default_workers();
  std::optional<fs::path> config_file;
  ConventionOverrides conv;
  FilterOverrides fo;
  SamplerOverrides so;

  SegmentOptions seg;
  auto* cmd_segment = app.add_subcommand("segment", "Split a pose file into fixed-length, re-anchored clips");
  cmd_segment->add_option("--input", seg.input, "Pose file (timestamp tx ty tz qx qy qz qw)")->required();
  cmd_segment->add_option("--fps", seg.fps, "Pose frame rate")->required()->check(CLI::PositiveNumber);
  cmd_segment->add_option("--clip-seconds", seg.clip_seconds, "Clip duration in seconds")->capture_default_str();
  cmd_segment->add_option("--id", seg.id, "Trajectory id (default: input file stem)");
  cmd_segment->add_option("--out", seg.out_dir, "Output clip directory")->required();
  add_workers_flag(cmd_segment, workers);

  FilterOptions filt;
  std::optional<fs::path> accepted_out;
  std::optional<fs::path> detections;
  auto* cmd_filter = app.add_subcommand("filter", "Apply the robot-compatibility rules to a clip directory");
  cmd_filter->add_option("--clips", filt.clips_dir, "Clip directory written by segment")->required();
  cmd_filter->add_option("--detections", detections, "Detections file indexed by source frame");
  cmd_filter->add_option("--config", config_file, "Pipeline config (JSON)");
  cmd_filter->add_option("--report", filt.report, "Verdict report output")->required();
  cmd_filter->add_option("--accepted", accepted_out, "Accepted clip list output (default: <report>.accepted.txt)");
  cmd_filter->add_option("--pitch-range-max-deg", fo.pitch_range_max_deg);
  cmd_filter->add_option("--divergence-max-deg", fo.divergence_max_deg);
  cmd_filter->add_option("--window-seconds", fo.window_seconds);
  cmd_filter->add_option("--min-window-displacement-m", fo.min_window_displacement_m);
  cmd_filter->add_option("--crowd-count-threshold", fo.crowd_count_threshold);
  cmd_filter->add_option("--crowd-frame-threshold", fo.crowd_frame_threshold);
  cmd_filter->add_option("--person-label", fo.person_label);
  cmd_filter->add_option("--person-score-min", fo.person_score_min);
  add_convention_flags(cmd_filter, conv);
  add_workers_flag(cmd_filter, workers);

  SamplesOptions samp;
  auto* cmd_samples = app.add_subcommand("samples", "Build training samples from accepted clips and landmarks");
  cmd_samples->add_option("--clips", samp.clips_dir, "Clip directory written by segment")->required();
  cmd_samples->add_option("--landmarks", samp.landmarks, "Landmark annotations")->required();
  cmd_samples->add_option("--accepted", samp.accepted, "Accepted clip list or filter report")->required();
  cmd_samples->add_option("--config", config_file, "Pipeline config (JSON)");
  cmd_samples->add_option("--seed", so.seed, "Sampling seed");
  cmd_samples->add_option("--out", samp.out, "Samples output")->required();
  cmd_samples->add_option("--history-len", so.history_len);
  cmd_samples->add_option("--horizon", so.horizon);
  cmd_samples->add_option("--min-offset", so.min_offset);
  cmd_samples->add_option("--max-offset", so.max_offset);
  cmd_samples->add_option("--arrival-window", so.arrival_window);
  cmd_samples->add_option("--arrival-fraction", so.arrival_fraction);
  cmd_samples->add_option("--waypoint-stride", so.waypoint_stride);
  cmd_samples->add_option("--draws-per-landmark", so.draws_per_landmark);
  add_convention_flags(cmd_samples, conv);
  add_workers_flag(cmd_samples, workers);

  EvalOptions ev;
  auto* cmd_eval = app.add_subcommand("eval", "Score waypoint predictions (AOE, MAOE, ADE, MADE)");
  cmd_eval->add_option("--pred", ev.predictions, "Prediction records")->required();
  cmd_eval->add_option("--out", ev.out, "Metric report output")->required();
  add_workers_flag(cmd_eval, workers);

  SynthOptions syn;
  std::optional<fs::path> synth_spec;
  auto* cmd_synth = app.add_subcommand("synth", "Generate synthetic poses, detections and landmarks");
  auto* spec_opt = cmd_synth->add_option("--spec", synth_spec, "Synth spec (JSON)");
  cmd_synth->add_flag("--oracle", "Use the built-in ten-clip oracle corpus")->excludes(spec_opt);
  cmd_synth->add_option("--out", syn.out_dir, "Output directory")->required();
  add_convention_flags(cmd_synth, conv);

  LossOptions lo;
  auto* cmd_loss = app.add_subcommand("loss", "Evaluate the loss kernels on a record of arrays");
  cmd_loss->add_option("--input", lo.input, "Loss input record (JSON)")->required();
  cmd_loss->add_flag("--gradients", lo.gradients, "Also print gradients");

  fs::path replay_manifest, replay_out;
  auto* cmd_replay = app.add_subcommand("replay", "Re-run a stage from its manifest");
  cmd_replay->add_option("--manifest", replay_manifest, "Stage manifest")->required();
  cmd_replay->add_option("--out", replay_out, "Output root for the re-run")->required();
  add_workers_flag(cmd_replay, workers);

  std::string command = "navcurate";
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    print_error(err, command, "UsageError", e.what());
    return 2;
  }

  try {
    PipelineConfig cfg;
    if (config_file) cfg = load_pipeline_config(*config_file);
    conv.apply(cfg.convention);
    fo.apply(cfg.filter);
    so.apply(cfg.sampler);

    Json summary;
    if (cmd_segment->parsed()) {
      command = "segment";
      seg.workers = workers;
      summary = run_segment(seg);
    } else if (cmd_filter->parsed()) {
      command = "filter";
      filt.detections = detections;
      filt.accepted_out = accepted_out;
      filt.config = cfg.filter;
      filt.convention = cfg.convention;
      filt.workers = workers;
      summary = run_filter(filt);
    } else if (cmd_samples->parsed()) {
      command = "samples";
      samp.config = cfg.sampler;
      samp.convention = cfg.convention;
      samp.workers = workers;
      summary = run_samples(samp);
    } else if (cmd_eval->parsed()) {
      command = "eval";
      ev.workers = workers;
      summary = run_eval(ev);
    } else if (cmd_synth->parsed()) {
      command = "synth";
      syn.spec = synth_spec;
      syn.convention = cfg.convention;
      summary = run_synth(syn);
    } else if (cmd_loss->parsed()) {
      command = "loss";
      out << dump_document(run_loss(lo));
      return 0;
    } else if (cmd_replay->parsed()) {
      command = "replay";
      summary = run_replay(replay_manifest, replay_out, workers);
    }
    out << summary.dump() << '\n';
    return 0;
  } catch (const ParseError& e) {
    print_error(err, command, to_string(e.kind()), e.what(), e.line());
    return exit_code_for(e.kind());
  } catch (const Error& e) {
    print_error(err, command, to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    print_error(err, command, "InternalError", e.what());
    return 1;
  }
}

}  // namespace navcurate::cli
