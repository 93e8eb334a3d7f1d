#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <navcurate/compat_filter.hpp>
#include <navcurate/geometry.hpp>
#include <navcurate/sample_builder.hpp>
#include <navcurate/trajectory_io.hpp>

namespace navcurate::cli {

inline constexpr const char* kToolName = "navcurate";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success, 1 unexpected failure, 2 parse/validation, 3 empty result, 4 I/O.
int exit_code_for(ErrorKind kind) noexcept;

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const fs::path& path);

struct SegmentOptions {
  fs::path input;
  double fps = 0.0;
  double clip_seconds = kDefaultClipSeconds;
  fs::path out_dir;
  std::string id;
  unsigned workers = 1;
};

struct FilterOptions {
  fs::path clips_dir;
  std::optional<fs::path> detections;
  fs::path report;
  /// Defaults to "<report stem>.accepted.txt" next to the report.
  std::optional<fs::path> accepted_out;
  FilterConfig config;
  AxisConvention convention;
  unsigned workers = 1;
};

struct SamplesOptions {
  fs::path clips_dir;
  fs::path landmarks;
  /// Accepted-clip list, or a filter report.
  fs::path accepted;
  fs::path out;
  SamplerConfig config;
  AxisConvention convention;
  unsigned workers = 1;
};

struct EvalOptions {
  fs::path predictions;
  fs::path out;
  unsigned workers = 1;
};

struct SynthOptions {
  std::optional<fs::path> spec;
  fs::path out_dir;
  AxisConvention convention;
};

struct LossOptions {
  fs::path input;
  bool gradients = false;
};

/// Each stage writes its outputs plus a manifest and returns a short summary
/// document (also printed by the tool). Failures are thrown as navcurate::Error.
Json run_segment(const SegmentOptions& options);
Json run_filter(const FilterOptions& options);
Json run_samples(const SamplesOptions& options);
Json run_eval(const EvalOptions& options);
Json run_synth(const SynthOptions& options);
Json run_loss(const LossOptions& options);

/// Re-executes the stage recorded in `manifest`, writing outputs under
/// `out_root` with the same relative names.
Json run_replay(const fs::path& manifest, const fs::path& out_root, unsigned workers);

/// Manifest path for a stage whose primary output is a file.
fs::path manifest_path_for(const fs::path& output_file);

/// Combined config document: {"convention": ..., "filter": ..., "sampler": ...}; every section optional.
struct PipelineConfig {
  FilterConfig filter;
  SamplerConfig sampler;
  AxisConvention convention;
};
PipelineConfig load_pipeline_config(const fs::path& path);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace navcurate::cli
