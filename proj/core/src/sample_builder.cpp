#include "navcurate/sample_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "navcurate/parallel.hpp"

namespace navcurate {

void SamplerConfig::validate() const {
  if (!(min_offset > 0 && min_offset <= max_offset)) {
    throw ValidationError("sampler config: require 0 < min_offset <= max_offset");
  }
  if (history_len < 1 || horizon < 1) throw ValidationError("sampler config: history_len and horizon must be >= 1");
  if (arrival_window < 0 || arrival_window >= min_offset) {
    throw ValidationError("sampler config: require 0 <= arrival_window < min_offset");
  }
  if (!(arrival_fraction >= 0.0 && arrival_fraction <= 1.0)) {
    throw ValidationError("sampler config: arrival_fraction must lie in [0, 1]");
  }
  if (waypoint_stride < 1) throw ValidationError("sampler config: waypoint_stride must be >= 1");
  if (draws_per_landmark < 1) throw ValidationError("sampler config: draws_per_landmark must be >= 1");
}

std::int64_t draw_start(std::int64_t t_g, const SamplerConfig& config, CounterRng& rng) {
  const std::int64_t hi = t_g - config.min_offset;
  if (hi < 0) {
    throw Error(ErrorKind::Infeasible, "goal frame " + std::to_string(t_g) + " leaves no start frame " +
                                           std::to_string(config.min_offset) + " frames earlier");
  }
  if (rng.uniform01() < config.arrival_fraction) {
    return rng.uniform_int(std::max<std::int64_t>(0, t_g - config.arrival_window), t_g);
  }
  return rng.uniform_int(std::max<std::int64_t>(0, t_g - config.max_offset), hi);
}

CounterRng sample_rng(std::uint64_t seed, std::string_view clip_id, std::int64_t landmark_ordinal,
                      std::int64_t draw_ordinal) {
  return CounterRng::keyed({seed, fnv1a64(clip_id), static_cast<std::uint64_t>(landmark_ordinal),
                            static_cast<std::uint64_t>(draw_ordinal)});
}

std::string make_sample_id(std::string_view clip_id, std::int64_t landmark_ordinal, std::int64_t draw_ordinal) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "_l%04lld_d%02lld", static_cast<long long>(landmark_ordinal),
                static_cast<long long>(draw_ordinal));
  return std::string(clip_id) + buf;
}

std::vector<std::int64_t> history_frames(std::int64_t t, const SamplerConfig& config) {
  std::vector<std::int64_t> frames(static_cast<std::size_t>(config.history_len));
  for (std::int64_t i = 0; i < config.history_len; ++i) {
    const std::int64_t back = (config.history_len - 1 - i) * config.waypoint_stride;
    frames[static_cast<std::size_t>(i)] = std::max<std::int64_t>(0, t - back);
  }
  return frames;
}

void validate_landmark(const LandmarkAnnotation& landmark, const Clip& clip) {
  if (landmark.clip_id != clip.clip_id) {
    throw ValidationError("landmark for clip '" + landmark.clip_id + "' applied to clip '" + clip.clip_id + "'");
  }
  if (landmark.goal_frame < 0 || landmark.goal_frame >= clip.size()) {
    throw ValidationError("landmark goal_frame " + std::to_string(landmark.goal_frame) + " outside clip '" +
                          clip.clip_id + "' of " + std::to_string(clip.size()) + " frames");
  }
}

TrainingSample build_sample(const Clip& clip, const LandmarkAnnotation& landmark, std::int64_t t,
                            const SamplerConfig& config, const AxisConvention& convention, std::string sample_id) {
  validate_landmark(landmark, clip);
  const std::int64_t last = t + config.horizon * config.waypoint_stride;
  if (t < 0 || last >= clip.size()) {
    throw Error(ErrorKind::OutOfBounds, "sample at t=" + std::to_string(t) + " needs frame " + std::to_string(last) +
                                            " but clip '" + clip.clip_id + "' has " + std::to_string(clip.size()));
  }

  TrainingSample sample;
  sample.sample_id = sample_id.empty() ? clip.clip_id + "_t" + std::to_string(t) : std::move(sample_id);
  sample.clip_id = clip.clip_id;
  sample.instruction = landmark.instruction;
  sample.t = t;
  sample.t_g = landmark.goal_frame;
  sample.history_frames = history_frames(t, config);
  sample.arrival = landmark.goal_frame - t <= config.arrival_window;

  const Pose reference = clip.leveled(static_cast<std::size_t>(t));
  sample.waypoints.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t i = 1; i <= config.horizon; ++i) {
    const Pose future = clip.leveled(static_cast<std::size_t>(t + i * config.waypoint_stride));
    sample.waypoints.push_back(to_ego_waypoint(reference, future.position(), convention));
  }
  return sample;
}

namespace {

struct ClipWork {
  const Clip* clip = nullptr;
  std::vector<const LandmarkAnnotation*> landmarks;
};

struct ClipOutput {
  std::vector<TrainingSample> samples;
  CorpusStats stats;
};

ClipOutput sample_clip(const ClipWork& work, const SamplerConfig& config, const AxisConvention& convention) {
  ClipOutput out;
  const Clip& clip = *work.clip;
  for (std::size_t ord = 0; ord < work.landmarks.size(); ++ord) {
    const LandmarkAnnotation& landmark = *work.landmarks[ord];
    validate_landmark(landmark, clip);
    ++out.stats.landmarks_used;
    const auto lm = static_cast<std::int64_t>(ord);
    for (std::int64_t draw = 0; draw < config.draws_per_landmark; ++draw) {
      CounterRng rng = sample_rng(config.seed, clip.clip_id, lm, draw);
      try {
        const std::int64_t t = draw_start(landmark.goal_frame, config, rng);
        out.samples.push_back(build_sample(clip, landmark, t, config, convention, make_sample_id(clip.clip_id, lm, draw)));
        if (out.samples.back().arrival) ++out.stats.arrival_samples;
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::Infeasible: ++out.stats.skipped_infeasible; break;
          case ErrorKind::OutOfBounds: ++out.stats.skipped_out_of_bounds; break;
          case ErrorKind::GimbalDegenerate: ++out.stats.skipped_gimbal; break;
          default: throw;
        }
      }
    }
  }
  out.stats.samples = static_cast<std::int64_t>(out.samples.size());
  return out;
}

}  // namespace

Corpus build_corpus(std::span<const Clip> clips, std::span<const LandmarkAnnotation> landmarks,
                    std::span<const FilterVerdict> verdicts, const SamplerConfig& config,
                    const AxisConvention& convention, unsigned workers) {
  config.validate();

  std::map<std::string, bool> accepted;
  for (const auto& v : verdicts) accepted[v.clip_id] = v.accepted;

  std::map<std::string, ClipWork> work;
  for (const auto& clip : clips) {
    auto it = accepted.find(clip.clip_id);
    if (it == accepted.end()) throw ValidationError("no filter verdict for clip '" + clip.clip_id + "'");
    if (it->second) work[clip.clip_id].clip = &clip;
  }

  Corpus corpus;
  std::map<std::string_view, bool> known;
  for (const auto& clip : clips) known[clip.clip_id] = true;
  for (const auto& landmark : landmarks) {
    auto it = work.find(landmark.clip_id);
    if (it != work.end()) {
      it->second.landmarks.push_back(&landmark);
    } else if (known.count(landmark.clip_id)) {
      ++corpus.stats.landmarks_rejected_clip;
    } else {
      ++corpus.stats.landmarks_unknown_clip;
    }
  }

  std::vector<const ClipWork*> ordered;
  ordered.reserve(work.size());
  for (const auto& [id, w] : work) ordered.push_back(&w);

  std::vector<ClipOutput> outputs(ordered.size());
  parallel_for(ordered.size(), workers,
               [&](std::size_t i) { outputs[i] = sample_clip(*ordered[i], config, convention); });

  corpus.stats.accepted_clips = static_cast<std::int64_t>(ordered.size());
  for (auto& out : outputs) {
    corpus.stats.landmarks_used += out.stats.landmarks_used;
    corpus.stats.skipped_infeasible += out.stats.skipped_infeasible;
    corpus.stats.skipped_out_of_bounds += out.stats.skipped_out_of_bounds;
    corpus.stats.skipped_gimbal += out.stats.skipped_gimbal;
    corpus.stats.arrival_samples += out.stats.arrival_samples;
    corpus.stats.samples += out.stats.samples;
    std::move(out.samples.begin(), out.samples.end(), std::back_inserter(corpus.samples));
  }
  return corpus;
}

}  // namespace navcurate
