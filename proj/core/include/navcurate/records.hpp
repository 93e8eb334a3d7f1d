#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navcurate/geometry.hpp"

namespace navcurate {

/// Pixel box [x1, y1, x2, y2] with x1 <= x2 and y1 <= y2.
using BBox = std::array<double, 4>;

/// A pose stream as produced by visual odometry for one video.
struct RawTrajectory {
  std::string id;
  double fps = 0.0;
  std::vector<Pose> poses;

  double duration() const noexcept {
    return poses.empty() ? 0.0 : poses.back().timestamp() - poses.front().timestamp();
  }
};

/// Throws ValidationError unless fps > 0, poses are non-empty and timestamps
/// strictly increase.
void validate(const RawTrajectory& trajectory);

struct Detection {
  std::string label;
  BBox bbox{};
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

struct DetectionFrame {
  std::int64_t frame = 0;
  std::vector<Detection> detections;

  bool operator==(const DetectionFrame&) const = default;
};

/// A language-grounded goal: the landmark visible at `goal_frame` of `clip_id`.
struct LandmarkAnnotation {
  std::string clip_id;
  std::int64_t goal_frame = 0;
  BBox bbox{};
  std::string name;
  std::string instruction;

  bool operator==(const LandmarkAnnotation&) const = default;
};

/// One imitation-learning example: observe history frames ending at `t`,
/// follow `instruction`, predict `waypoints` in the frame of pose(t).
struct TrainingSample {
  std::string sample_id;
  std::string clip_id;
  std::string instruction;
  std::int64_t t = 0;
  std::int64_t t_g = 0;
  std::vector<std::int64_t> history_frames;
  std::vector<EgoWaypoint> waypoints;
  bool arrival = false;

  bool operator==(const TrainingSample&) const = default;
};

/// A model prediction paired with its ground truth, in egocentric coordinates.
struct PredictionRecord {
  std::string sample_id;
  std::vector<EgoWaypoint> predicted;
  std::vector<EgoWaypoint> ground_truth;
  std::optional<double> predicted_arrival;
  std::optional<bool> arrival_label;

  bool operator==(const PredictionRecord&) const = default;
};

}  // namespace navcurate
