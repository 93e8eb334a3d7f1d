#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "navcurate/records.hpp"

namespace navcurate {

/// Steps shorter than this are treated as having no direction.
inline constexpr double kMinStepLength = 1e-9;

/// Unit direction of each step w_i - w_{i-1}, with w_0 at the origin;
/// nullopt for steps shorter than kMinStepLength.
std::vector<std::optional<Eigen::Vector2d>> step_directions(std::span<const EgoWaypoint> waypoints);

struct OrientationErrors {
  /// Angle in [0, 180] degrees for each step defined on both sides, in step order.
  std::vector<double> errors_deg;
  std::int64_t excluded_steps = 0;
};

/// Throws Error(LengthMismatch) on unequal lengths and Error(AllUndefined) when
/// no step has a direction on both sides.
OrientationErrors orientation_errors(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt);

/// Mean of the defined per-step orientation errors.
double aoe(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt);
/// Largest defined per-step orientation error.
double maoe(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt);

/// Mean Euclidean distance between corresponding waypoints.
double ade(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt);

/// Discrete Fréchet distance between two polylines, O(n·m) time, O(m) memory.
/// Requires both to be non-empty.
double frechet_distance(std::span<const Eigen::Vector2d> p, std::span<const Eigen::Vector2d> q);

/// MADE: discrete Fréchet distance of the two waypoint paths, each starting at the origin.
double discrete_frechet(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt);

struct SampleMetrics {
  /// Unset when no step had a direction on both sides.
  std::optional<double> aoe_deg;
  std::optional<double> maoe_deg;
  double ade_m = 0.0;
  double made_m = 0.0;
  std::optional<bool> arrival_correct;
};

SampleMetrics evaluate_record(const PredictionRecord& record);

struct MetricReport {
  std::int64_t n_samples = 0;
  /// Samples contributing to the orientation means.
  std::int64_t n_orientation_samples = 0;
  std::int64_t n_arrival_samples = 0;
  std::optional<double> mean_aoe_deg;
  std::optional<double> mean_maoe_deg;
  double mean_ade_m = 0.0;
  double mean_made_m = 0.0;
  std::optional<double> arrival_accuracy;
};

/// Per-record metrics in parallel, then unweighted means accumulated in input
/// order. Throws Error(EmptyInput) for no records.
MetricReport evaluate(std::span<const PredictionRecord> records, unsigned workers = 1);

}  // namespace navcurate
