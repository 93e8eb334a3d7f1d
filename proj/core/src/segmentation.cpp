#include "navcurate/segmentation.hpp"

#include <cmath>
#include <cstdio>

namespace navcurate {

void validate(const RawTrajectory& trajectory) {
  if (!(trajectory.fps > 0.0) || !std::isfinite(trajectory.fps)) {
    throw ValidationError("trajectory '" + trajectory.id + "': fps must be positive");
  }
  if (trajectory.poses.empty()) {
    throw ValidationError("trajectory '" + trajectory.id + "' has no poses");
  }
  for (std::size_t i = 1; i < trajectory.poses.size(); ++i) {
    if (!(trajectory.poses[i].timestamp() > trajectory.poses[i - 1].timestamp())) {
      throw ValidationError("trajectory '" + trajectory.id + "': timestamps not strictly increasing at frame " +
                            std::to_string(i));
    }
  }
}

std::int64_t clip_length(double fps, double clip_seconds) {
  if (!(clip_seconds > 0.0) || !std::isfinite(clip_seconds)) {
    throw ValidationError("clip_seconds must be positive");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps must be positive");
  const auto frames = static_cast<std::int64_t>(std::llround(clip_seconds * fps));
  if (frames < 1) throw ValidationError("clip length rounds to zero frames");
  return frames;
}

std::string make_clip_id(const std::string& source_id, std::int64_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04lld", static_cast<long long>(ordinal));
  return source_id + buf;
}

Pose Clip::leveled(std::size_t i) const {
  return compose(Pose(0.0, Eigen::Vector3d::Zero(), anchor_orientation), poses.at(i));
}

std::vector<Pose> anchor_to_first(std::vector<Pose> poses) {
  if (poses.empty()) return poses;
  const Pose anchor = poses.front();
  for (auto& p : poses) p = relative_pose(anchor, p);
  return poses;
}

ClipStream::ClipStream(std::string source_id, double fps, double clip_seconds)
    : source_id_(std::move(source_id)), fps_(fps), length_(clip_length(fps, clip_seconds)) {
  pending_.reserve(static_cast<std::size_t>(length_));
}

std::optional<Clip> ClipStream::push(const Pose& pose) {
  if (last_timestamp_ && !(pose.timestamp() > *last_timestamp_)) {
    throw ValidationError("trajectory '" + source_id_ + "': timestamps not strictly increasing at frame " +
                          std::to_string(frames_));
  }
  last_timestamp_ = pose.timestamp();
  ++frames_;
  pending_.push_back(pose);
  if (static_cast<std::int64_t>(pending_.size()) < length_) return std::nullopt;

  Clip clip;
  clip.clip_id = make_clip_id(source_id_, clips_);
  clip.source_id = source_id_;
  clip.fps = fps_;
  clip.start_frame = clips_ * length_;
  clip.anchor_orientation = pending_.front().orientation();
  clip.poses = anchor_to_first(std::move(pending_));
  pending_.clear();
  pending_.reserve(static_cast<std::size_t>(length_));
  ++clips_;
  return clip;
}

void ClipStream::finish() const {
  if (frames_ == 0) throw ValidationError("trajectory '" + source_id_ + "' has no poses");
  if (clips_ == 0) {
    throw Error(ErrorKind::EmptyResult, "trajectory '" + source_id_ + "' has " + std::to_string(frames_) +
                                            " frames, fewer than one clip of " + std::to_string(length_));
  }
}

std::vector<Clip> segment(const RawTrajectory& trajectory, double clip_seconds) {
  validate(trajectory);
  ClipStream stream(trajectory.id, trajectory.fps, clip_seconds);
  std::vector<Clip> clips;
  clips.reserve(trajectory.poses.size() / static_cast<std::size_t>(stream.clip_frames()));
  for (const auto& p : trajectory.poses) {
    if (auto clip = stream.push(p)) clips.push_back(std::move(*clip));
  }
  stream.finish();
  return clips;
}

}  // namespace navcurate
