#include "navcurate/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace navcurate {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kMinQuaternionNorm = 1e-3;
constexpr double kVerticalTolerance = 1e-6;

int axis_index(Axis axis) noexcept { return static_cast<int>(axis) / 2; }
double axis_sign(Axis axis) noexcept { return static_cast<int>(axis) % 2 == 0 ? 1.0 : -1.0; }

Eigen::Vector3d unit(int index) noexcept {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  v[index] = 1.0;
  return v;
}

}  // namespace

Eigen::Vector3d axis_vector(Axis axis) noexcept { return axis_sign(axis) * unit(axis_index(axis)); }

std::string_view to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::PosX: return "+x";
    case Axis::NegX: return "-x";
    case Axis::PosY: return "+y";
    case Axis::NegY: return "-y";
    case Axis::PosZ: return "+z";
    case Axis::NegZ: return "-z";
  }
  return "+z";
}

Axis parse_axis(std::string_view text) {
  bool negative = false;
  std::string_view rest = text;
  if (!rest.empty() && (rest.front() == '+' || rest.front() == '-')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  if (rest.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(rest.front()))) {
      case 'x': return negative ? Axis::NegX : Axis::PosX;
      case 'y': return negative ? Axis::NegY : Axis::PosY;
      case 'z': return negative ? Axis::NegZ : Axis::PosZ;
      default: break;
    }
  }
  throw ValidationError("invalid axis '" + std::string(text) + "' (expected e.g. +z, -y)");
}

// For up = s·e_k the ground basis is (e_{k+1}, s·e_{k+2}), which is right-handed
// with respect to up.
Eigen::Vector3d AxisConvention::ground_x() const noexcept {
  return unit((axis_index(world_up) + 1) % 3);
}

Eigen::Vector3d AxisConvention::ground_y() const noexcept {
  return axis_sign(world_up) * unit((axis_index(world_up) + 2) % 3);
}

AngleDeg AngleDeg::from_radians(double radians) { return AngleDeg(radians * kDegPerRad); }

double AngleDeg::normalize(double degrees) noexcept {
  double a = std::fmod(degrees, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double AngleDeg::radians() const noexcept { return value_ / kDegPerRad; }

Pose::Pose(double timestamp, const Eigen::Vector3d& position, const Eigen::Quaterniond& orientation)
    : timestamp_(timestamp), position_(position), orientation_(orientation) {
  if (!std::isfinite(timestamp) || timestamp < 0.0) {
    throw ValidationError("pose timestamp must be finite and non-negative");
  }
  if (!position.allFinite() || !orientation.coeffs().allFinite()) {
    throw ValidationError("pose contains non-finite values");
  }
  const double norm = orientation.norm();
  if (norm < kMinQuaternionNorm) {
    throw ValidationError("quaternion norm " + std::to_string(norm) + " is too small to normalize");
  }
  orientation_.coeffs() /= norm;
}

Pose Pose::identity(double timestamp) {
  return Pose(timestamp, Eigen::Vector3d::Zero(), Eigen::Quaterniond::Identity());
}

Pose Pose::with_timestamp(double timestamp) const {
  return Pose(timestamp, position_, orientation_);
}

Eigen::Vector3d forward_vector(const Pose& pose, const AxisConvention& convention) {
  return pose.orientation() * convention.forward();
}

AngleDeg pitch_of(const Pose& pose, const AxisConvention& convention) {
  const double up = forward_vector(pose, convention).dot(convention.up());
  return AngleDeg::from_radians(std::asin(std::clamp(up, -1.0, 1.0)));
}

std::optional<AngleDeg> try_yaw_of(const Pose& pose, const AxisConvention& convention) {
  const Eigen::Vector2d ground = convention.to_ground(forward_vector(pose, convention));
  if (ground.norm() < kVerticalTolerance) return std::nullopt;
  return AngleDeg::from_radians(std::atan2(ground.y(), ground.x()));
}

AngleDeg yaw_of(const Pose& pose, const AxisConvention& convention) {
  if (auto yaw = try_yaw_of(pose, convention)) return *yaw;
  throw GimbalDegenerate();
}

Pose relative_pose(const Pose& anchor, const Pose& p) {
  const Eigen::Quaterniond inv = anchor.orientation().conjugate();
  Eigen::Quaterniond q = inv * p.orientation();
  q.normalize();
  return Pose(Pose::Trusted{}, p.timestamp(), inv * (p.position() - anchor.position()), q);
}

Pose compose(const Pose& anchor, const Pose& relative) {
  Eigen::Quaterniond q = anchor.orientation() * relative.orientation();
  q.normalize();
  return Pose(Pose::Trusted{}, relative.timestamp(),
              anchor.orientation() * relative.position() + anchor.position(), q);
}

EgoWaypoint to_ego_waypoint(const Pose& reference, const Eigen::Vector3d& target_position,
                            const AxisConvention& convention) {
  const Eigen::Vector2d heading = convention.to_ground(forward_vector(reference, convention));
  const double norm = heading.norm();
  if (norm < kVerticalTolerance) throw GimbalDegenerate();
  const Eigen::Vector2d fwd = heading / norm;
  const Eigen::Vector2d d = convention.to_ground(target_position - reference.position());
  // Rotation by -yaw: forward component along fwd, left component along fwd rotated +90°.
  return {fwd.x() * d.x() + fwd.y() * d.y(), -fwd.y() * d.x() + fwd.x() * d.y()};
}

Eigen::Quaterniond camera_orientation(double yaw_deg, double pitch_deg,
                                      const AxisConvention& convention) {
  const Eigen::Quaterniond level =
      Eigen::Quaterniond::FromTwoVectors(convention.forward(), convention.ground_x());
  const Eigen::AngleAxisd pitch(-pitch_deg / kDegPerRad, convention.ground_y());
  const Eigen::AngleAxisd yaw(yaw_deg / kDegPerRad, convention.up());
  Eigen::Quaterniond q = Eigen::Quaterniond(yaw) * Eigen::Quaterniond(pitch) * level;
  q.normalize();
  return q;
}

}  // namespace navcurate
