#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <string_view>

#include "navcurate/errors.hpp"

namespace navcurate {

/// Signed principal axis, used to name the camera-forward and world-up directions.
enum class Axis { PosX, NegX, PosY, NegY, PosZ, NegZ };

Eigen::Vector3d axis_vector(Axis axis) noexcept;
std::string_view to_string(Axis axis) noexcept;
/// Accepts "+x", "-y", "z" (sign optional, case-insensitive). Throws ValidationError.
Axis parse_axis(std::string_view text);

/// Frame conventions of the pose source. Defaults: camera looks along its +Z,
/// world up is +Z. Yaw is measured in the ground plane spanned by
/// (ground_x, ground_y), with ground_x × ground_y == up.
struct AxisConvention {
  Axis camera_forward = Axis::PosZ;
  Axis world_up = Axis::PosZ;

  Eigen::Vector3d forward() const noexcept { return axis_vector(camera_forward); }
  Eigen::Vector3d up() const noexcept { return axis_vector(world_up); }
  Eigen::Vector3d ground_x() const noexcept;
  Eigen::Vector3d ground_y() const noexcept;

  /// Components of `v` along (ground_x, ground_y); the vertical part is dropped.
  Eigen::Vector2d to_ground(const Eigen::Vector3d& v) const noexcept {
    return {v.dot(ground_x()), v.dot(ground_y())};
  }

  bool operator==(const AxisConvention&) const = default;
};

/// Angle in degrees, always normalized to (-180, 180].
class AngleDeg {
 public:
  constexpr AngleDeg() = default;
  explicit AngleDeg(double degrees) : value_(normalize(degrees)) {}

  static AngleDeg from_radians(double radians);
  static double normalize(double degrees) noexcept;

  double value() const noexcept { return value_; }
  double radians() const noexcept;

  friend AngleDeg operator-(AngleDeg a, AngleDeg b) { return AngleDeg(a.value_ - b.value_); }
  friend AngleDeg operator+(AngleDeg a, AngleDeg b) { return AngleDeg(a.value_ + b.value_); }

 private:
  double value_ = 0.0;
};

/// Timestamped camera pose; orientation is camera-to-world.
class Pose {
 public:
  /// Renormalizes `orientation`. Throws ValidationError when its norm is below
  /// 1e-3, or when any input is non-finite or the timestamp is negative.
  Pose(double timestamp, const Eigen::Vector3d& position, const Eigen::Quaterniond& orientation);

  static Pose identity(double timestamp = 0.0);

  double timestamp() const noexcept { return timestamp_; }
  const Eigen::Vector3d& position() const noexcept { return position_; }
  const Eigen::Quaterniond& orientation() const noexcept { return orientation_; }

  Pose with_timestamp(double timestamp) const;

 private:
  struct Trusted {};
  Pose(Trusted, double timestamp, const Eigen::Vector3d& position,
       const Eigen::Quaterniond& orientation) noexcept
      : timestamp_(timestamp), position_(position), orientation_(orientation) {}

  friend Pose relative_pose(const Pose& anchor, const Pose& p);
  friend Pose compose(const Pose& anchor, const Pose& relative);

  double timestamp_;
  Eigen::Vector3d position_;
  Eigen::Quaterniond orientation_;
};

/// Ground-plane position relative to a reference pose: x forward, y left.
struct EgoWaypoint {
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d vec() const noexcept { return {x, y}; }
  bool operator==(const EgoWaypoint&) const = default;
};

/// Thrown by yaw-dependent operations when the camera looks straight up or down.
class GimbalDegenerate : public Error {
 public:
  GimbalDegenerate() : Error(ErrorKind::GimbalDegenerate, "camera forward is vertical; yaw undefined") {}
};

/// Camera-forward unit vector in world coordinates.
Eigen::Vector3d forward_vector(const Pose& pose, const AxisConvention& convention = {});

/// Elevation of the camera-forward vector above the ground plane; positive looks up.
AngleDeg pitch_of(const Pose& pose, const AxisConvention& convention = {});

/// Heading of the camera-forward vector in the ground plane, or nullopt when
/// the forward vector is within 1e-6 of vertical.
std::optional<AngleDeg> try_yaw_of(const Pose& pose, const AxisConvention& convention = {});

/// As try_yaw_of, but throws GimbalDegenerate.
AngleDeg yaw_of(const Pose& pose, const AxisConvention& convention = {});

/// `p` expressed in the frame of `anchor`; timestamp of `p` is kept.
Pose relative_pose(const Pose& anchor, const Pose& p);

/// Inverse of relative_pose: maps a pose given in `anchor`'s frame back to the world.
Pose compose(const Pose& anchor, const Pose& relative);

/// Projects `target_position` into the ground-plane frame of `reference`
/// (x along its heading, y to its left). Throws GimbalDegenerate.
EgoWaypoint to_ego_waypoint(const Pose& reference, const Eigen::Vector3d& target_position,
                            const AxisConvention& convention = {});

/// Orientation whose camera-forward vector has the given yaw and pitch. Roll is
/// fixed by the minimal rotation taking camera-forward onto ground_x.
Eigen::Quaterniond camera_orientation(double yaw_deg, double pitch_deg,
                                      const AxisConvention& convention = {});

}  // namespace navcurate
