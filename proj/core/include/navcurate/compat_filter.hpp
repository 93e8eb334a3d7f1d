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

/// Robot-compatibility thresholds. Every rule rejects only on strict excess, so a
/// statistic equal to its threshold passes.
struct FilterConfig {
  double pitch_range_max_deg = 15.0;
  double divergence_max_deg = 60.0;
  double window_seconds = 1.0;
  double min_window_displacement_m = 0.5;
  std::int64_t crowd_count_threshold = 5;
  std::int64_t crowd_frame_threshold = 3;
  std::string person_label = "person";
  double person_score_min = 0.5;

  /// Throws ValidationError unless thresholds are positive and person_score_min is in [0, 1].
  void validate() const;

  bool operator==(const FilterConfig&) const = default;
};

enum class RejectReason { PitchRange, ViewDivergence, CrowdDensity };

std::string_view to_string(RejectReason reason) noexcept;
RejectReason parse_reject_reason(std::string_view text);

struct FilterDiagnostics {
  double pitch_range_deg = 0.0;
  /// NaN when the clip is shorter than one divergence window.
  double max_divergence_deg = 0.0;
  std::int64_t crowded_frame_count = 0;
  /// Detection frames that fell outside the clip and were ignored.
  std::int64_t ignored_detection_frames = 0;
};

struct FilterVerdict {
  std::string clip_id;
  bool accepted = true;
  /// Sorted, without duplicates; empty iff accepted.
  std::vector<RejectReason> reasons;
  FilterDiagnostics diagnostics;
};

struct PitchCheck {
  bool pass = true;
  double pitch_range_deg = 0.0;
};

struct DivergenceCheck {
  bool pass = true;
  double max_divergence_deg = 0.0;
  /// Windows that moved far enough and had a defined view direction.
  std::int64_t windows_evaluated = 0;
};

struct CrowdCheck {
  bool pass = true;
  std::int64_t crowded_frame_count = 0;
  std::int64_t ignored_frames = 0;
};

/// Peak-to-peak camera pitch over the clip.
PitchCheck check_pitch(const Clip& clip, const FilterConfig& config, const AxisConvention& convention = {});

/// Frames per divergence window: round(window_seconds * fps), at least 2.
std::int64_t divergence_window_frames(double fps, const FilterConfig& config);

/// Slides a window over the clip and compares the ground-plane displacement
/// direction from window start to end with the camera yaw at the window center.
/// Stationary windows and windows whose center yaw is undefined are skipped.
/// Throws Error(TooShort) when the clip has fewer frames than one window.
DivergenceCheck check_divergence(const Clip& clip, const FilterConfig& config,
                                 const AxisConvention& convention = {});

/// Counts frames with more than crowd_count_threshold persons. `detections`
/// use clip-relative frame indices; entries outside the clip are ignored and counted.
CrowdCheck check_crowd(const Clip& clip, std::span<const DetectionFrame> detections, const FilterConfig& config);

/// Runs all three rules (no short-circuit) and collects the failed ones.
FilterVerdict run_filters(const Clip& clip, std::span<const DetectionFrame> detections,
                          const FilterConfig& config, const AxisConvention& convention = {});

/// Detections of the clip's source frames [start_frame, start_frame + size),
/// re-indexed relative to the clip.
std::vector<DetectionFrame> detections_for_clip(const Clip& clip, std::span<const DetectionFrame> source_detections);

struct FilterReport {
  /// Sorted by clip_id.
  std::vector<FilterVerdict> verdicts;
  /// Source detection frames not covered by any clip.
  std::int64_t unassigned_detection_frames = 0;

  std::int64_t accepted_count() const noexcept;
  std::int64_t rejected_count(RejectReason reason) const noexcept;
  std::vector<std::string> accepted_clip_ids() const;
};

/// Filters clips in parallel. `source_detections` are indexed by source frame
/// and may cover several clips of the same source.
FilterReport filter_clips(std::span<const Clip> clips, std::span<const DetectionFrame> source_detections,
                          const FilterConfig& config, const AxisConvention& convention, unsigned workers);

}  // namespace navcurate
