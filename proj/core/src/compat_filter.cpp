#include "navcurate/compat_filter.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>

#include "navcurate/parallel.hpp"

namespace navcurate {

void FilterConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("filter config: ") + name + " must be positive");
  };
  positive(pitch_range_max_deg, "pitch_range_max_deg");
  positive(divergence_max_deg, "divergence_max_deg");
  positive(window_seconds, "window_seconds");
  positive(min_window_displacement_m, "min_window_displacement_m");
  positive(static_cast<double>(crowd_count_threshold), "crowd_count_threshold");
  positive(static_cast<double>(crowd_frame_threshold), "crowd_frame_threshold");
  if (!(person_score_min >= 0.0 && person_score_min <= 1.0)) {
    throw ValidationError("filter config: person_score_min must lie in [0, 1]");
  }
  if (person_label.empty()) throw ValidationError("filter config: person_label is empty");
}

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::PitchRange: return "pitch_range";
    case RejectReason::ViewDivergence: return "view_divergence";
    case RejectReason::CrowdDensity: return "crowd_density";
  }
  return "unknown";
}

RejectReason parse_reject_reason(std::string_view text) {
  for (auto r : {RejectReason::PitchRange, RejectReason::ViewDivergence, RejectReason::CrowdDensity}) {
    if (to_string(r) == text) return r;
  }
  throw ValidationError("unknown reject reason '" + std::string(text) + "'");
}

PitchCheck check_pitch(const Clip& clip, const FilterConfig& config, const AxisConvention& convention) {
  if (clip.poses.empty()) return {};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < clip.poses.size(); ++i) {
    const double p = pitch_of(clip.leveled(i), convention).value();
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const double range = hi - lo;
  return {range <= config.pitch_range_max_deg, range};
}

std::int64_t divergence_window_frames(double fps, const FilterConfig& config) {
  return std::max<std::int64_t>(2, std::llround(config.window_seconds * fps));
}

DivergenceCheck check_divergence(const Clip& clip, const FilterConfig& config, const AxisConvention& convention) {
  const std::int64_t window = divergence_window_frames(clip.fps, config);
  const std::int64_t n = clip.size();
  if (n < window) {
    throw Error(ErrorKind::TooShort, "clip '" + clip.clip_id + "' has " + std::to_string(n) +
                                         " frames, shorter than one divergence window of " + std::to_string(window));
  }

  // Per-frame ground position and view yaw, computed once for all windows.
  std::vector<Eigen::Vector2d> ground(static_cast<std::size_t>(n));
  std::vector<std::optional<AngleDeg>> yaw(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const Pose pose = clip.leveled(static_cast<std::size_t>(i));
    ground[static_cast<std::size_t>(i)] = convention.to_ground(pose.position());
    yaw[static_cast<std::size_t>(i)] = try_yaw_of(pose, convention);
  }

  DivergenceCheck result;
  const double min_disp_sq = config.min_window_displacement_m * config.min_window_displacement_m;
  const std::int64_t center_offset = (window - 1) / 2;
  for (std::int64_t s = 0; s + window <= n; ++s) {
    const Eigen::Vector2d disp = ground[static_cast<std::size_t>(s + window - 1)] - ground[static_cast<std::size_t>(s)];
    if (disp.squaredNorm() < min_disp_sq) continue;
    const auto& view = yaw[static_cast<std::size_t>(s + center_offset)];
    if (!view) continue;
    const AngleDeg motion = AngleDeg::from_radians(std::atan2(disp.y(), disp.x()));
    const double divergence = std::abs((*view - motion).value());
    result.max_divergence_deg = std::max(result.max_divergence_deg, divergence);
    ++result.windows_evaluated;
  }
  result.pass = result.max_divergence_deg <= config.divergence_max_deg;
  return result;
}

CrowdCheck check_crowd(const Clip& clip, std::span<const DetectionFrame> detections, const FilterConfig& config) {
  CrowdCheck result;
  std::map<std::int64_t, std::int64_t> persons;
  for (const auto& frame : detections) {
    if (frame.frame < 0 || frame.frame >= clip.size()) {
      ++result.ignored_frames;
      continue;
    }
    auto& count = persons[frame.frame];
    for (const auto& d : frame.detections) {
      if (d.label == config.person_label && d.score >= config.person_score_min) ++count;
    }
  }
  for (const auto& [frame, count] : persons) {
    if (count > config.crowd_count_threshold) ++result.crowded_frame_count;
  }
  result.pass = result.crowded_frame_count <= config.crowd_frame_threshold;
  return result;
}

FilterVerdict run_filters(const Clip& clip, std::span<const DetectionFrame> detections, const FilterConfig& config,
                          const AxisConvention& convention) {
  FilterVerdict verdict;
  verdict.clip_id = clip.clip_id;

  const PitchCheck pitch = check_pitch(clip, config, convention);
  verdict.diagnostics.pitch_range_deg = pitch.pitch_range_deg;
  if (!pitch.pass) verdict.reasons.push_back(RejectReason::PitchRange);

  try {
    const DivergenceCheck div = check_divergence(clip, config, convention);
    verdict.diagnostics.max_divergence_deg = div.max_divergence_deg;
    if (!div.pass) verdict.reasons.push_back(RejectReason::ViewDivergence);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooShort) throw;
    verdict.diagnostics.max_divergence_deg = std::numeric_limits<double>::quiet_NaN();
    verdict.reasons.push_back(RejectReason::ViewDivergence);
  }

  const CrowdCheck crowd = check_crowd(clip, detections, config);
  verdict.diagnostics.crowded_frame_count = crowd.crowded_frame_count;
  verdict.diagnostics.ignored_detection_frames = crowd.ignored_frames;
  if (!crowd.pass) verdict.reasons.push_back(RejectReason::CrowdDensity);

  verdict.accepted = verdict.reasons.empty();
  return verdict;
}

std::vector<DetectionFrame> detections_for_clip(const Clip& clip, std::span<const DetectionFrame> source_detections) {
  const std::int64_t begin = clip.start_frame;
  const std::int64_t end = clip.start_frame + clip.size();
  auto by_frame = [](const DetectionFrame& f, std::int64_t v) { return f.frame < v; };
  std::vector<DetectionFrame> out;
  if (std::is_sorted(source_detections.begin(), source_detections.end(),
                     [](const auto& a, const auto& b) { return a.frame < b.frame; })) {
    auto it = std::lower_bound(source_detections.begin(), source_detections.end(), begin, by_frame);
    for (; it != source_detections.end() && it->frame < end; ++it) {
      out.push_back({it->frame - begin, it->detections});
    }
  } else {
    for (const auto& f : source_detections) {
      if (f.frame >= begin && f.frame < end) out.push_back({f.frame - begin, f.detections});
    }
  }
  return out;
}

std::int64_t FilterReport::accepted_count() const noexcept {
  return std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.accepted; });
}

std::int64_t FilterReport::rejected_count(RejectReason reason) const noexcept {
  return std::count_if(verdicts.begin(), verdicts.end(), [reason](const auto& v) {
    return std::find(v.reasons.begin(), v.reasons.end(), reason) != v.reasons.end();
  });
}

std::vector<std::string> FilterReport::accepted_clip_ids() const {
  std::vector<std::string> ids;
  for (const auto& v : verdicts) {
    if (v.accepted) ids.push_back(v.clip_id);
  }
  return ids;
}

FilterReport filter_clips(std::span<const Clip> clips, std::span<const DetectionFrame> source_detections,
                          const FilterConfig& config, const AxisConvention& convention, unsigned workers) {
  config.validate();
  FilterReport report;
  report.verdicts.resize(clips.size());
  parallel_for(clips.size(), workers, [&](std::size_t i) {
    const auto dets = detections_for_clip(clips[i], source_detections);
    report.verdicts[i] = run_filters(clips[i], dets, config, convention);
  });
  std::sort(report.verdicts.begin(), report.verdicts.end(),
            [](const auto& a, const auto& b) { return a.clip_id < b.clip_id; });

  // Union of clip frame ranges, merged so a single binary search decides coverage.
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  ranges.reserve(clips.size());
  for (const auto& c : clips) ranges.emplace_back(c.start_frame, c.start_frame + c.size());
  std::sort(ranges.begin(), ranges.end());
  std::vector<std::pair<std::int64_t, std::int64_t>> merged;
  for (const auto& r : ranges) {
    if (!merged.empty() && r.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, r.second);
    } else {
      merged.push_back(r);
    }
  }
  for (const auto& frame : source_detections) {
    auto it = std::upper_bound(merged.begin(), merged.end(), frame.frame,
                               [](std::int64_t v, const auto& r) { return v < r.first; });
    const bool covered = it != merged.begin() && frame.frame < std::prev(it)->second;
    if (!covered) ++report.unassigned_detection_frames;
  }
  return report;
}

}  // namespace navcurate
