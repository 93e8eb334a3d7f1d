#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navcurate/compat_filter.hpp"
#include "navcurate/eval_metrics.hpp"
#include "navcurate/loss_kernels.hpp"
#include "navcurate/records.hpp"
#include "navcurate/sample_builder.hpp"
#include "navcurate/synth_gen.hpp"

// On-disk formats.
//
// Pose files: one pose per line, "timestamp tx ty tz qx qy qz qw", fields
// separated by single spaces, '.' as decimal point. Lines starting with '#'
// are comments; empty lines are skipped.
//
// Record files (detections, landmarks, samples, predictions): UTF-8, one JSON
// object per line. Keys are emitted in lexicographic order:
//   detections   {"detections":[{"bbox":[x1,y1,x2,y2],"label":s,"score":r}],"frame":i}
//   landmarks    {"bbox":[...],"clip_id":s,"goal_frame":i,"instruction":s,"name":s}
//   samples      {"arrival":b,"clip_id":s,"history_frames":[i...],"instruction":s,
//                 "sample_id":s,"t":i,"t_g":i,"waypoints":[[x,y]...]}
//   predictions  {"arrival_label":b?,"ground_truth":[[x,y]...],"predicted":[[x,y]...],
//                 "predicted_arrival":r?,"sample_id":s}
// Unknown keys, missing required keys and out-of-range values are rejected.
//
// Reports and configs: pretty-printed JSON documents with sorted keys.

namespace navcurate {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// ---- pose streams ----

/// Parses a pose file. The trajectory id is the file stem unless `id` is given.
/// Throws ParseError (with line number), ValidationError, IoError.
RawTrajectory parse_pose_file(const fs::path& path, double fps, std::string id = {});
RawTrajectory parse_pose_stream(std::istream& in, std::string id, double fps);

/// Shortest round-trip decimal rendering of every field.
std::string format_pose_line(const Pose& pose);
void write_pose_file(const fs::path& path, std::span<const Pose> poses);

/// Parses a pose file one line at a time, calling `fn` per pose in file order.
/// Returns the pose count. Throws like parse_pose_file except for the checks
/// that need the whole trajectory (fps, emptiness, timestamp order).
std::int64_t for_each_pose(const fs::path& path, const std::function<void(const Pose&)>& fn);

// ---- line-delimited records ----

std::string to_line(const DetectionFrame& frame);
std::string to_line(const LandmarkAnnotation& landmark);
std::string to_line(const TrainingSample& sample);
std::string to_line(const PredictionRecord& record);

DetectionFrame detection_frame_from_line(std::string_view line, std::size_t line_no = 0);
/// Throws ParseError for structural problems, ValidationError for an empty instruction.
LandmarkAnnotation landmark_from_line(std::string_view line, std::size_t line_no = 0);
TrainingSample sample_from_line(std::string_view line, std::size_t line_no = 0);
PredictionRecord prediction_from_line(std::string_view line, std::size_t line_no = 0);

/// Sorted by frame; records sharing a frame index are merged in file order.
std::vector<DetectionFrame> parse_detections(const fs::path& path);
std::vector<LandmarkAnnotation> parse_landmarks(const fs::path& path);
std::vector<TrainingSample> parse_samples(const fs::path& path);
std::vector<PredictionRecord> parse_predictions(const fs::path& path);

void write_detections(std::span<const DetectionFrame> frames, const fs::path& path);
void write_landmarks(std::span<const LandmarkAnnotation> landmarks, const fs::path& path);
void write_samples(std::span<const TrainingSample> samples, const fs::path& path);
void write_predictions(std::span<const PredictionRecord> records, const fs::path& path);

// ---- reports ----

Json report_to_json(const FilterReport& report);
Json report_to_json(const MetricReport& report);
FilterReport filter_report_from_json(const Json& doc);
MetricReport metric_report_from_json(const Json& doc);

void write_report(const FilterReport& report, const fs::path& path);
void write_report(const MetricReport& report, const fs::path& path);
FilterReport parse_filter_report(const fs::path& path);

/// Plain list, one clip id per line.
void write_clip_list(std::span<const std::string> ids, const fs::path& path);
std::vector<std::string> parse_clip_list(const fs::path& path);

// ---- configs ----
// Config objects may omit keys (defaults apply) but may not carry unknown keys.

Json to_json(const FilterConfig& config);
Json to_json(const SamplerConfig& config);
Json to_json(const AxisConvention& convention);
Json to_json(const LossWeights& weights);
Json to_json(const SynthSpec& spec);
Json to_json(const SynthBundleSpec& spec);

FilterConfig filter_config_from_json(const Json& doc);
SamplerConfig sampler_config_from_json(const Json& doc);
AxisConvention axis_convention_from_json(const Json& doc);
LossWeights loss_weights_from_json(const Json& doc);
SynthSpec synth_spec_from_json(const Json& doc);
/// Accepts either a bundle document ({"trajectory": ..., ...}) or a bare trajectory spec.
SynthBundleSpec synth_bundle_spec_from_json(const Json& doc);

// ---- documents ----

/// Reads a JSON document; throws IoError or ParseError.
Json read_json_file(const fs::path& path);
/// Pretty-printed (indent 2), sorted keys, trailing newline.
void write_json_file(const Json& doc, const fs::path& path);
std::string dump_document(const Json& doc);

/// Whole-file helpers; throw IoError.
std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view contents);

}  // namespace navcurate
