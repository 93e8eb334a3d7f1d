#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "navcurate/geometry.hpp"

namespace navcurate {

// Reference values and analytic gradients of the training objective, for
// cross-checking external training code. All gradients are with respect to
// the predicted quantity.

struct LossWeights {
  double reg = 1.0;
  double ori = 1.0;
  double arr = 1.0;
  double hall = 1.0;

  /// Throws ValidationError unless every weight is finite and non-negative.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct WaypointLoss {
  double value = 0.0;
  std::vector<Eigen::Vector2d> gradient;
};

enum class RegressionNorm {
  /// (1/k) Σ ‖ŵ_i − w_i‖²
  Squared,
  /// (1/k) Σ ‖ŵ_i − w_i‖; gradient is zero where the two coincide.
  Euclidean,
};

/// Waypoint regression loss. Throws Error(LengthMismatch) on unequal or empty inputs.
WaypointLoss loss_reg(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt,
                      RegressionNorm norm = RegressionNorm::Squared);

/// Negative mean cosine similarity between predicted and ground-truth step
/// displacements (first step measured from the origin); norms are floored at
/// `eps`. Throws Error(LengthMismatch).
WaypointLoss loss_ori(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt, double eps = 1e-8);

struct ScalarLoss {
  double value = 0.0;
  double gradient = 0.0;
};

/// Binary cross-entropy on a logit, stable for any magnitude of `logit`.
ScalarLoss loss_arr(double logit, bool label);

/// k x d matrix, one feature vector per future step.
using FeatureSeq = Eigen::MatrixXd;

struct FeatureLoss {
  double value = 0.0;
  Eigen::MatrixXd gradient;
};

/// (1/k) Σ_f ‖ĥ_f − h_f‖₁ with subgradient sign(diff)/k, sign(0) = 0.
/// Throws Error(ShapeMismatch) when shapes differ or k = 0.
FeatureLoss loss_hall(const FeatureSeq& pred, const FeatureSeq& gt);

struct LossComponents {
  double reg = 0.0;
  double ori = 0.0;
  double arr = 0.0;
  double hall = 0.0;
};

double loss_total(const LossComponents& components, const LossWeights& weights);

}  // namespace navcurate
