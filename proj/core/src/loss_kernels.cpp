#include "navcurate/loss_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace navcurate {

namespace {

void require_matching(std::size_t a, std::size_t b) {
  if (a != b || a == 0) {
    throw Error(ErrorKind::LengthMismatch, "waypoint lists must be non-empty and equal length (got " +
                                               std::to_string(a) + " and " + std::to_string(b) + ")");
  }
}

}  // namespace

void LossWeights::validate() const {
  for (double w : {reg, ori, arr, hall}) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("loss weights must be finite and non-negative");
  }
}

WaypointLoss loss_reg(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt, RegressionNorm norm) {
  require_matching(pred.size(), gt.size());
  const double inv_k = 1.0 / static_cast<double>(pred.size());
  WaypointLoss out;
  out.gradient.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Eigen::Vector2d diff = pred[i].vec() - gt[i].vec();
    if (norm == RegressionNorm::Squared) {
      out.value += diff.squaredNorm();
      out.gradient.push_back(2.0 * inv_k * diff);
    } else {
      const double len = diff.norm();
      out.value += len;
      out.gradient.push_back(len > 0.0 ? Eigen::Vector2d(inv_k * diff / len) : Eigen::Vector2d::Zero());
    }
  }
  out.value *= inv_k;
  return out;
}

WaypointLoss loss_ori(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt, double eps) {
  require_matching(pred.size(), gt.size());
  const std::size_t k = pred.size();
  const double inv_k = 1.0 / static_cast<double>(k);

  // Gradient with respect to each predicted displacement d̂_i.
  std::vector<Eigen::Vector2d> grad_disp(k);
  double sum = 0.0;
  Eigen::Vector2d prev_pred(0.0, 0.0), prev_gt(0.0, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Vector2d dp = pred[i].vec() - prev_pred;
    const Eigen::Vector2d dg = gt[i].vec() - prev_gt;
    prev_pred = pred[i].vec();
    prev_gt = gt[i].vec();

    // cos through sqrt(|dp|^2 |dg|^2) so that pred == gt gives exactly 1
    const double np2 = dp.squaredNorm();
    const double sp2 = std::max(np2, eps * eps);
    const double sg2 = std::max(dg.squaredNorm(), eps * eps);
    const double spg = std::sqrt(sp2 * sg2);
    const double sg = std::sqrt(sg2);
    const double dot = dp.dot(dg);
    sum += dot / spg;

    // ∂cos/∂d̂ = d / (s_p s_g) − [s_p = ‖d̂‖] · (d̂·d) d̂ / (‖d̂‖³ s_g)
    Eigen::Vector2d dcos = dg / spg;
    if (np2 > eps * eps) dcos -= dot * dp / (np2 * std::sqrt(np2) * sg);
    grad_disp[i] = -inv_k * dcos;
  }

  WaypointLoss out;
  out.value = -sum / static_cast<double>(k);
  // d̂_i = ŵ_i − ŵ_{i−1}, so ŵ_i feeds d̂_i positively and d̂_{i+1} negatively.
  out.gradient.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.gradient[i] = grad_disp[i];
    if (i + 1 < k) out.gradient[i] -= grad_disp[i + 1];
  }
  return out;
}

ScalarLoss loss_arr(double logit, bool label) {
  const double y = label ? 1.0 : 0.0;
  ScalarLoss out;
  out.value = std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
  const double sigmoid = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
  out.gradient = sigmoid - y;
  return out;
}

FeatureLoss loss_hall(const FeatureSeq& pred, const FeatureSeq& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols() || pred.rows() == 0) {
    throw Error(ErrorKind::ShapeMismatch, "feature sequences must share a non-empty k x d shape (got " +
                                              std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) +
                                              " and " + std::to_string(gt.rows()) + "x" +
                                              std::to_string(gt.cols()) + ")");
  }
  const double inv_k = 1.0 / static_cast<double>(pred.rows());
  const Eigen::MatrixXd diff = pred - gt;
  FeatureLoss out;
  out.value = inv_k * diff.cwiseAbs().sum();
  out.gradient = inv_k * diff.unaryExpr([](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); });
  return out;
}

double loss_total(const LossComponents& c, const LossWeights& w) {
  return w.reg * c.reg + w.ori * c.ori + w.arr * c.arr + w.hall * c.hall;
}

}  // namespace navcurate
