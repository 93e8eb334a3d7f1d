#include "navcurate/synth_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "navcurate/rng.hpp"

namespace navcurate {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorKind::InvalidSpec, message); }

std::int64_t frames_for(double duration_s, double fps) {
  return static_cast<std::int64_t>(std::llround(duration_s * fps));
}

void validate_piece(const SynthSpec& s, double fps) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(s.duration_s > 0.0) || !finite(s.duration_s)) invalid("duration_s must be positive");
  if (frames_for(s.duration_s, fps) < 1) invalid("duration_s is shorter than one frame");
  if (s.kind != SynthKind::Stationary && (!(s.speed_mps > 0.0) || !finite(s.speed_mps))) {
    invalid("speed_mps must be positive");
  }
  if (!finite(s.start_yaw_deg) || !finite(s.yaw_rate_deg_s) || !finite(s.amplitude_deg) || !finite(s.turn_deg)) {
    invalid("angles must be finite");
  }
  if (s.kind == SynthKind::SinusoidPitch) {
    if (!(s.period_s > 0.0) || !finite(s.period_s)) invalid("period_s must be positive");
    if (std::abs(s.amplitude_deg) >= 90.0) invalid("amplitude_deg must be below 90");
  }
  if (s.kind == SynthKind::HeadTurn) {
    if (!(s.turn_len_s > 0.0) || s.turn_start_s < 0.0 || s.turn_start_s + s.turn_len_s > s.duration_s) {
      invalid("turn interval must lie inside the duration");
    }
    if (!(s.turn_ramp_s >= 0.0)) invalid("turn_ramp_s must be non-negative");
  }
  if (!(s.position_noise_m >= 0.0) || !finite(s.position_noise_m)) invalid("position_noise_m must be >= 0");
}

/// View offset of a head turn at local time tau.
double head_turn_offset(const SynthSpec& s, double tau) {
  const double u = tau - s.turn_start_s;
  if (u < 0.0 || u > s.turn_len_s) return 0.0;
  const double ramp = std::min(s.turn_ramp_s, s.turn_len_s / 2.0);
  if (ramp <= 0.0) return s.turn_deg;
  if (u < ramp) return s.turn_deg * u / ramp;
  if (u > s.turn_len_s - ramp) return s.turn_deg * (s.turn_len_s - u) / ramp;
  return s.turn_deg;
}

struct WalkState {
  Eigen::Vector2d position{0.0, 0.0};
  double heading_deg = 0.0;
};

struct PieceSample {
  Eigen::Vector2d position;
  double heading_deg;
  double view_yaw_deg;
  double pitch_deg;
};

PieceSample sample_piece(const SynthSpec& s, const WalkState& start, double tau) {
  PieceSample out{start.position, start.heading_deg, start.heading_deg, 0.0};
  const double h0 = start.heading_deg * kRadPerDeg;
  switch (s.kind) {
    case SynthKind::Stationary:
      break;
    case SynthKind::Arc:
      if (s.yaw_rate_deg_s != 0.0) {
        const double omega = s.yaw_rate_deg_s * kRadPerDeg;
        const double h = h0 + omega * tau;
        const double r = s.speed_mps / omega;
        out.position += Eigen::Vector2d(r * (std::sin(h) - std::sin(h0)), r * (std::cos(h0) - std::cos(h)));
        out.heading_deg = start.heading_deg + s.yaw_rate_deg_s * tau;
        out.view_yaw_deg = out.heading_deg;
        break;
      }
      [[fallthrough]];
    case SynthKind::Straight:
    case SynthKind::SinusoidPitch:
    case SynthKind::HeadTurn:
    case SynthKind::Composite:
      out.position += s.speed_mps * tau * Eigen::Vector2d(std::cos(h0), std::sin(h0));
      break;
  }
  if (s.kind == SynthKind::SinusoidPitch) {
    out.pitch_deg = s.amplitude_deg * std::sin(2.0 * std::numbers::pi * tau / s.period_s);
  }
  if (s.kind == SynthKind::HeadTurn) out.view_yaw_deg += head_turn_offset(s, tau);
  return out;
}

double gaussian(CounterRng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::string_view to_string(SynthKind kind) noexcept {
  switch (kind) {
    case SynthKind::Straight: return "straight";
    case SynthKind::Arc: return "arc";
    case SynthKind::SinusoidPitch: return "sinusoid_pitch";
    case SynthKind::HeadTurn: return "head_turn";
    case SynthKind::Stationary: return "stationary";
    case SynthKind::Composite: return "composite";
  }
  return "straight";
}

SynthKind parse_synth_kind(std::string_view text) {
  for (auto k : {SynthKind::Straight, SynthKind::Arc, SynthKind::SinusoidPitch, SynthKind::HeadTurn,
                 SynthKind::Stationary, SynthKind::Composite}) {
    if (to_string(k) == text) return k;
  }
  invalid("unknown synth kind '" + std::string(text) + "'");
}

void SynthSpec::validate() const {
  if (id.empty()) invalid("id must not be empty");
  if (!(fps > 0.0) || !std::isfinite(fps)) invalid("fps must be positive");
  if (kind == SynthKind::Composite) {
    if (segments.empty()) invalid("composite spec needs segments");
    for (const auto& piece : segments) {
      if (piece.kind == SynthKind::Composite) invalid("composite segments cannot nest");
      validate_piece(piece, fps);
    }
  } else {
    if (!segments.empty()) invalid("only composite specs take segments");
    validate_piece(*this, fps);
  }
}

std::int64_t frame_count(const SynthSpec& spec) {
  if (spec.kind != SynthKind::Composite) return frames_for(spec.duration_s, spec.fps);
  std::int64_t total = 0;
  for (const auto& piece : spec.segments) total += frames_for(piece.duration_s, spec.fps);
  return total;
}

RawTrajectory generate(const SynthSpec& spec, const AxisConvention& convention) {
  spec.validate();
  const std::vector<SynthSpec> single{spec};
  const auto& pieces = spec.kind == SynthKind::Composite ? spec.segments : single;

  RawTrajectory traj;
  traj.id = spec.id;
  traj.fps = spec.fps;
  traj.poses.reserve(static_cast<std::size_t>(frame_count(spec)));

  const Eigen::Vector3d gx = convention.ground_x();
  const Eigen::Vector3d gy = convention.ground_y();
  WalkState state{{0.0, 0.0}, spec.start_yaw_deg};
  std::int64_t frame = 0;
  for (const auto& piece : pieces) {
    const std::int64_t n = frames_for(piece.duration_s, spec.fps);
    const double noise = piece.position_noise_m;
    for (std::int64_t i = 0; i < n; ++i, ++frame) {
      const double tau = static_cast<double>(i) / spec.fps;
      const PieceSample s = sample_piece(piece, state, tau);
      Eigen::Vector2d ground = s.position;
      if (noise > 0.0) {
        CounterRng rng = CounterRng::keyed({piece.seed, static_cast<std::uint64_t>(frame)});
        ground += noise * Eigen::Vector2d(gaussian(rng), gaussian(rng));
      }
      traj.poses.emplace_back(static_cast<double>(frame) / spec.fps, ground.x() * gx + ground.y() * gy,
                              camera_orientation(s.view_yaw_deg, s.pitch_deg, convention));
    }
    // The next piece continues from the closed-form end of this one.
    const PieceSample end = sample_piece(piece, state, static_cast<double>(n) / spec.fps);
    state = {end.position, end.heading_deg};
  }
  return traj;
}

std::vector<DetectionFrame> generate_detections(std::int64_t frame_count, std::span<const std::int64_t> schedule) {
  if (frame_count < 0) invalid("frame_count must be non-negative");
  if (static_cast<std::int64_t>(schedule.size()) > frame_count) invalid("count schedule is longer than the clip");
  std::vector<DetectionFrame> frames(static_cast<std::size_t>(frame_count));
  for (std::int64_t f = 0; f < frame_count; ++f) {
    auto& out = frames[static_cast<std::size_t>(f)];
    out.frame = f;
    const std::int64_t count = f < static_cast<std::int64_t>(schedule.size()) ? schedule[static_cast<std::size_t>(f)] : 0;
    if (count < 0) invalid("count schedule has a negative entry");
    for (std::int64_t j = 0; j < count; ++j) {
      const double x = 20.0 + 60.0 * static_cast<double>(j);
      out.detections.push_back({"person", {x, 200.0, x + 40.0, 320.0}, 0.9});
    }
  }
  return frames;
}

SynthLandmarks generate_landmarks(const Clip& clip, std::int64_t n, std::uint64_t seed) {
  static constexpr std::array<const char*, 8> kNames = {"red door",      "bus stop",   "fountain",    "newsstand",
                                                        "glass tower",   "park gate",  "cafe awning", "street lamp"};
  SynthLandmarks out;
  if (n <= 0 || clip.size() == 0) return out;
  const std::int64_t first = clip.size() / 2;
  const std::int64_t span = clip.size() - first;
  if (n > span) {
    out.truncated = n - span;
    n = span;
  }
  CounterRng rng = CounterRng::keyed({seed, fnv1a64(clip.clip_id)});
  for (std::int64_t i = 0; i < n; ++i) {
    // Cell i of n equal cells over the second half; one goal frame per cell.
    const std::int64_t lo = first + i * span / n;
    const std::int64_t hi = first + (i + 1) * span / n - 1;
    LandmarkAnnotation lm;
    lm.clip_id = clip.clip_id;
    lm.goal_frame = rng.uniform_int(lo, hi);
    lm.name = kNames[static_cast<std::size_t>(rng.uniform_int(0, kNames.size() - 1))];
    const double x = static_cast<double>(rng.uniform_int(0, 500));
    const double y = static_cast<double>(rng.uniform_int(0, 300));
    lm.bbox = {x, y, x + 120.0, y + 80.0};
    lm.instruction = "go to landmark #" + std::to_string(i) + " near " + clip.clip_id;
    out.landmarks.push_back(std::move(lm));
  }
  return out;
}

std::vector<std::int64_t> crowd_schedule(std::span<const CrowdRun> runs, std::int64_t frame_count) {
  std::vector<std::int64_t> schedule(static_cast<std::size_t>(std::max<std::int64_t>(frame_count, 0)), 0);
  for (const auto& run : runs) {
    if (run.start_frame < 0 || run.frames < 0 || run.count < 0 || run.start_frame + run.frames > frame_count) {
      invalid("crowd run outside the trajectory");
    }
    for (std::int64_t f = run.start_frame; f < run.start_frame + run.frames; ++f) {
      schedule[static_cast<std::size_t>(f)] = run.count;
    }
  }
  return schedule;
}

SynthBundle generate_bundle(const SynthBundleSpec& spec, const AxisConvention& convention) {
  SynthBundle bundle;
  bundle.trajectory = generate(spec.trajectory, convention);
  const auto frames = static_cast<std::int64_t>(bundle.trajectory.poses.size());
  const auto schedule = crowd_schedule(spec.crowd, frames);
  bundle.detections = generate_detections(frames, schedule);
  if (spec.landmarks_per_clip > 0) {
    std::vector<Clip> clips;
    try {
      clips = segment(bundle.trajectory, spec.clip_seconds);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyResult) throw;
    }
    for (const auto& clip : clips) {
      auto lms = generate_landmarks(clip, spec.landmarks_per_clip, spec.landmark_seed);
      bundle.truncated_landmarks += lms.truncated;
      std::move(lms.landmarks.begin(), lms.landmarks.end(), std::back_inserter(bundle.landmarks));
    }
  }
  return bundle;
}

SynthBundleSpec oracle_corpus_spec() {
  constexpr double kClip = 120.0;
  constexpr std::int64_t kFrames = 3600;
  auto piece = [&](SynthKind kind) {
    SynthSpec s;
    s.kind = kind;
    s.duration_s = kClip;
    return s;
  };

  SynthBundleSpec spec;
  spec.trajectory.id = "oracle";
  spec.trajectory.kind = SynthKind::Composite;
  spec.trajectory.fps = 30.0;

  auto& seg = spec.trajectory.segments;
  seg.push_back(piece(SynthKind::Straight));  // 0: clean
  auto pitch10 = piece(SynthKind::SinusoidPitch);
  pitch10.amplitude_deg = 10.0;
  seg.push_back(pitch10);  // 1: pitch range 20° > 15°
  auto arc = piece(SynthKind::Arc);
  arc.yaw_rate_deg_s = 3.0;
  seg.push_back(arc);  // 2: clean
  auto turn75 = piece(SynthKind::HeadTurn);
  turn75.turn_deg = 75.0;
  turn75.turn_start_s = 40.0;
  turn75.turn_len_s = 3.0;
  seg.push_back(turn75);  // 3: divergence 75° > 60°
  auto pitch5 = piece(SynthKind::SinusoidPitch);
  pitch5.amplitude_deg = 5.0;
  seg.push_back(pitch5);                      // 4: pitch range 10°
  seg.push_back(piece(SynthKind::Straight));  // 5: crowded, see below
  auto turn45 = turn75;
  turn45.turn_deg = 45.0;
  seg.push_back(turn45);                      // 6: divergence 45°
  seg.push_back(piece(SynthKind::Straight));  // 7: crowd at the boundary, see below
  auto turn100 = turn75;
  turn100.turn_deg = -100.0;
  seg.push_back(turn100);                       // 8: divergence 100°
  seg.push_back(piece(SynthKind::Stationary));  // 9: clean, no divergence windows

  spec.crowd = {
      {5 * kFrames + 600, 4, 6},   // four frames with six persons
      {7 * kFrames + 300, 3, 6},   // three frames with six persons
      {7 * kFrames + 1200, 5, 5},  // five frames with five persons
  };
  spec.clip_seconds = kClip;
  spec.landmarks_per_clip = 3;
  spec.landmark_seed = 7;
  return spec;
}

}  // namespace navcurate
