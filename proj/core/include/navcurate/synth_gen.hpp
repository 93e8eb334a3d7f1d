#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navcurate/geometry.hpp"
#include "navcurate/records.hpp"
#include "navcurate/segmentation.hpp"

namespace navcurate {

enum class SynthKind { Straight, Arc, SinusoidPitch, HeadTurn, Stationary, Composite };

std::string_view to_string(SynthKind kind) noexcept;
/// Throws Error(InvalidSpec) for unknown names.
SynthKind parse_synth_kind(std::string_view text);

/// Closed-form walk description. The agent moves along its heading in the
/// ground plane; the camera looks along the heading plus any head-turn offset,
/// tilted by any pitch oscillation.
struct SynthSpec {
  std::string id = "synth";
  SynthKind kind = SynthKind::Straight;
  double duration_s = 120.0;
  double fps = 30.0;
  double speed_mps = 1.4;
  double start_yaw_deg = 0.0;
  /// Arc: heading change per second.
  double yaw_rate_deg_s = 0.0;
  /// SinusoidPitch: pitch(t) = amplitude_deg · sin(2πt / period_s).
  double amplitude_deg = 0.0;
  double period_s = 4.0;
  /// HeadTurn: view offset ramps to turn_deg over turn_ramp_s, holds, and ramps
  /// back, all within [turn_start_s, turn_start_s + turn_len_s].
  double turn_deg = 0.0;
  double turn_start_s = 0.0;
  double turn_len_s = 0.0;
  double turn_ramp_s = 0.5;
  /// Standard deviation of Gaussian jitter added to each position; 0 disables.
  double position_noise_m = 0.0;
  std::uint64_t seed = 0;
  /// Composite: pieces walked back to back, each continuing from where the last
  /// ended. Pieces use the parent's fps and may not be composite themselves.
  std::vector<SynthSpec> segments;

  /// Throws Error(InvalidSpec).
  void validate() const;
};

/// Deterministic pose sequence with timestamps i / fps.
RawTrajectory generate(const SynthSpec& spec, const AxisConvention& convention = {});

/// Number of frames generate() emits for `spec`.
std::int64_t frame_count(const SynthSpec& spec);

/// One DetectionFrame per frame in [0, frame_count) with schedule[i] person boxes
/// (score 0.9) at frame i; frames past the schedule are empty. Throws
/// Error(InvalidSpec) if the schedule is longer than frame_count or has negative entries.
std::vector<DetectionFrame> generate_detections(std::int64_t frame_count, std::span<const std::int64_t> schedule);

struct SynthLandmarks {
  std::vector<LandmarkAnnotation> landmarks;
  /// Requested landmarks that did not fit.
  std::int64_t truncated = 0;
};

/// n landmarks at distinct goal frames spread over the second half of the clip,
/// with placeholder instructions "go to landmark #i near <clip_id>".
SynthLandmarks generate_landmarks(const Clip& clip, std::int64_t n, std::uint64_t seed);

/// A contiguous run of frames with a fixed person count.
struct CrowdRun {
  std::int64_t start_frame = 0;
  std::int64_t frames = 0;
  std::int64_t count = 0;
};

/// Everything `navcurate synth` writes: one trajectory, its detections and
/// landmarks for each clip the trajectory segments into.
struct SynthBundleSpec {
  SynthSpec trajectory;
  std::vector<CrowdRun> crowd;
  double clip_seconds = kDefaultClipSeconds;
  std::int64_t landmarks_per_clip = 0;
  std::uint64_t landmark_seed = 0;
};

struct SynthBundle {
  RawTrajectory trajectory;
  std::vector<DetectionFrame> detections;
  std::vector<LandmarkAnnotation> landmarks;
  std::int64_t truncated_landmarks = 0;
};

std::vector<std::int64_t> crowd_schedule(std::span<const CrowdRun> runs, std::int64_t frame_count);

SynthBundle generate_bundle(const SynthBundleSpec& spec, const AxisConvention& convention = {});

/// Ten two-minute clips at 30 fps in one composite trajectory; clips 1, 3, 5 and
/// 8 each break exactly one rule (pitch, head turn, crowd, head turn), the
/// other six pass every rule under the default filter config.
SynthBundleSpec oracle_corpus_spec();

}  // namespace navcurate
