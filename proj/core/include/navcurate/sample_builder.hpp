#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "navcurate/compat_filter.hpp"
#include "navcurate/geometry.hpp"
#include "navcurate/records.hpp"
#include "navcurate/rng.hpp"
#include "navcurate/segmentation.hpp"

namespace navcurate {

struct SamplerConfig {
  std::int64_t history_len = 8;
  std::int64_t horizon = 8;
  /// Start offsets before the goal frame for approach samples, in frames.
  std::int64_t min_offset = 10;
  std::int64_t max_offset = 60;
  /// Samples with t_g - t <= arrival_window are arrival cases.
  std::int64_t arrival_window = 2;
  double arrival_fraction = 0.1;
  std::int64_t waypoint_stride = 1;
  std::int64_t draws_per_landmark = 1;
  std::uint64_t seed = 0;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  bool operator==(const SamplerConfig&) const = default;
};

/// Draws the start frame t for goal frame t_g. With probability
/// arrival_fraction, t is uniform in [t_g - arrival_window, t_g] (clamped at 0);
/// otherwise uniform in [t_g - max_offset, t_g - min_offset] clamped at 0.
/// Throws Error(Infeasible) when the approach interval is empty.
std::int64_t draw_start(std::int64_t t_g, const SamplerConfig& config, CounterRng& rng);

/// Stream for one (clip, landmark, draw) triple.
CounterRng sample_rng(std::uint64_t seed, std::string_view clip_id, std::int64_t landmark_ordinal,
                      std::int64_t draw_ordinal);

/// "<clip_id>_l<landmark:04>_d<draw:02>"
std::string make_sample_id(std::string_view clip_id, std::int64_t landmark_ordinal, std::int64_t draw_ordinal);

/// History frames t-(k-1)·stride .. t, clamped at frame 0.
std::vector<std::int64_t> history_frames(std::int64_t t, const SamplerConfig& config);

/// Builds the sample starting at frame t toward `landmark`. Waypoint i is pose
/// t + (i+1)·stride projected into the ground frame of pose t.
/// Throws Error(OutOfBounds) if the horizon leaves the clip, ValidationError if
/// the landmark does not belong to the clip, GimbalDegenerate from geometry.
TrainingSample build_sample(const Clip& clip, const LandmarkAnnotation& landmark, std::int64_t t,
                            const SamplerConfig& config, const AxisConvention& convention = {},
                            std::string sample_id = {});

/// Throws ValidationError when goal_frame lies outside the clip or clip ids differ.
void validate_landmark(const LandmarkAnnotation& landmark, const Clip& clip);

struct CorpusStats {
  std::int64_t accepted_clips = 0;
  std::int64_t landmarks_used = 0;
  std::int64_t landmarks_unknown_clip = 0;
  std::int64_t landmarks_rejected_clip = 0;
  std::int64_t skipped_infeasible = 0;
  std::int64_t skipped_out_of_bounds = 0;
  std::int64_t skipped_gimbal = 0;
  std::int64_t arrival_samples = 0;
  std::int64_t samples = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct Corpus {
  /// Ordered by (clip_id, landmark ordinal, draw ordinal).
  std::vector<TrainingSample> samples;
  CorpusStats stats;
};

/// Samples every landmark of every accepted clip draws_per_landmark times.
/// Landmark ordinals follow input order within each clip. Every clip needs a
/// verdict (ValidationError otherwise); per-landmark failures are counted, not thrown.
Corpus build_corpus(std::span<const Clip> clips, std::span<const LandmarkAnnotation> landmarks,
                    std::span<const FilterVerdict> verdicts, const SamplerConfig& config,
                    const AxisConvention& convention, unsigned workers);

}  // namespace navcurate
