#pragma once

#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navcurate/records.hpp"

namespace navcurate {

/// Fixed-length window of a trajectory, re-anchored so its first pose is the identity.
///
/// Full re-anchoring rotates the world up axis away from the convention's up,
/// so the clip also keeps the world orientation of its first raw pose. Pitch,
/// yaw and ground-plane projections go through leveled(), which puts that
/// rotation back (positions stay relative to the first frame).
struct Clip {
  std::string clip_id;
  std::string source_id;
  double fps = 0.0;
  std::int64_t start_frame = 0;
  std::vector<Pose> poses;
  Eigen::Quaterniond anchor_orientation = Eigen::Quaterniond::Identity();

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(poses.size()); }
  /// poses[i] rotated back into world axes, origin at the first frame.
  Pose leveled(std::size_t i) const;
};

inline constexpr double kDefaultClipSeconds = 120.0;

/// Frames per clip: round(clip_seconds * fps).
std::int64_t clip_length(double fps, double clip_seconds);

/// "<source>_<ordinal>", ordinal zero-padded to four digits.
std::string make_clip_id(const std::string& source_id, std::int64_t ordinal);

/// Splits `trajectory` into consecutive non-overlapping clips of clip_length()
/// frames. A trailing partial window is dropped. Throws Error(EmptyResult) when
/// not even one full clip fits, ValidationError on bad arguments.
std::vector<Clip> segment(const RawTrajectory& trajectory, double clip_seconds = kDefaultClipSeconds);

/// Incremental segment(): feed poses in order and take each clip as soon as it
/// is complete, so a long trajectory never has to sit in memory at once.
class ClipStream {
 public:
  /// Throws ValidationError on bad fps or clip_seconds.
  ClipStream(std::string source_id, double fps, double clip_seconds = kDefaultClipSeconds);

  /// Throws ValidationError unless timestamps strictly increase.
  std::optional<Clip> push(const Pose& pose);

  /// Call after the last pose. Throws like segment() when the stream was empty
  /// or too short for one clip.
  void finish() const;

  std::int64_t frames_seen() const noexcept { return frames_; }
  std::int64_t clips_emitted() const noexcept { return clips_; }
  std::int64_t clip_frames() const noexcept { return length_; }

 private:
  std::string source_id_;
  double fps_;
  std::int64_t length_;
  std::int64_t frames_ = 0;
  std::int64_t clips_ = 0;
  std::optional<double> last_timestamp_;
  std::vector<Pose> pending_;
};

/// Re-anchors `poses` to their first element.
std::vector<Pose> anchor_to_first(std::vector<Pose> poses);

}  // namespace navcurate
