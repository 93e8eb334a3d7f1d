#include "navcurate/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "navcurate/parallel.hpp"

namespace navcurate {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::LengthMismatch,
                "predicted has " + std::to_string(a) + " waypoints, ground truth " + std::to_string(b));
  }
}

std::vector<Eigen::Vector2d> with_origin(std::span<const EgoWaypoint> w) {
  std::vector<Eigen::Vector2d> path;
  path.reserve(w.size() + 1);
  path.emplace_back(0.0, 0.0);
  for (const auto& p : w) path.push_back(p.vec());
  return path;
}

}  // namespace

std::vector<std::optional<Eigen::Vector2d>> step_directions(std::span<const EgoWaypoint> waypoints) {
  std::vector<std::optional<Eigen::Vector2d>> dirs;
  dirs.reserve(waypoints.size());
  Eigen::Vector2d prev(0.0, 0.0);
  for (const auto& w : waypoints) {
    const Eigen::Vector2d step = w.vec() - prev;
    const double len = step.norm();
    if (len < kMinStepLength) {
      dirs.emplace_back(std::nullopt);
    } else {
      dirs.emplace_back(step / len);
    }
    prev = w.vec();
  }
  return dirs;
}

OrientationErrors orientation_errors(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt) {
  require_same_length(pred.size(), gt.size());
  const auto dp = step_directions(pred);
  const auto dg = step_directions(gt);
  OrientationErrors out;
  for (std::size_t i = 0; i < dp.size(); ++i) {
    if (!dp[i] || !dg[i]) {
      ++out.excluded_steps;
      continue;
    }
    // atan2 of cross and dot stays accurate near 0° and 180°, unlike acos.
    const double cross = dp[i]->x() * dg[i]->y() - dp[i]->y() * dg[i]->x();
    const double dot = dp[i]->dot(*dg[i]);
    out.errors_deg.push_back(std::abs(std::atan2(cross, dot)) * 180.0 / std::numbers::pi);
  }
  if (out.errors_deg.empty()) {
    throw Error(ErrorKind::AllUndefined, "no step has a defined direction in both trajectories");
  }
  return out;
}

double aoe(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt) {
  const auto e = orientation_errors(pred, gt).errors_deg;
  return std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
}

double maoe(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt) {
  const auto e = orientation_errors(pred, gt).errors_deg;
  return *std::max_element(e.begin(), e.end());
}

double ade(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt) {
  require_same_length(pred.size(), gt.size());
  if (pred.empty()) throw Error(ErrorKind::EmptyInput, "ade of empty waypoint lists");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i].vec() - gt[i].vec()).norm();
  return sum / static_cast<double>(pred.size());
}

double frechet_distance(std::span<const Eigen::Vector2d> p, std::span<const Eigen::Vector2d> q) {
  if (p.empty() || q.empty()) throw Error(ErrorKind::EmptyInput, "frechet distance of an empty polyline");
  // row[j] holds D(i, j) for the current i; `diag` carries D(i-1, j-1).
  std::vector<double> row(q.size());
  row[0] = (p[0] - q[0]).norm();
  for (std::size_t j = 1; j < q.size(); ++j) row[j] = std::max(row[j - 1], (p[0] - q[j]).norm());
  for (std::size_t i = 1; i < p.size(); ++i) {
    double diag = row[0];
    row[0] = std::max(row[0], (p[i] - q[0]).norm());
    for (std::size_t j = 1; j < q.size(); ++j) {
      const double up = row[j];
      row[j] = std::max((p[i] - q[j]).norm(), std::min({up, row[j - 1], diag}));
      diag = up;
    }
  }
  return row.back();
}

double discrete_frechet(std::span<const EgoWaypoint> pred, std::span<const EgoWaypoint> gt) {
  const auto p = with_origin(pred);
  const auto q = with_origin(gt);
  return frechet_distance(p, q);
}

SampleMetrics evaluate_record(const PredictionRecord& record) {
  if (record.predicted.empty()) throw ValidationError("record '" + record.sample_id + "' has no waypoints");
  SampleMetrics m;
  m.ade_m = ade(record.predicted, record.ground_truth);
  m.made_m = discrete_frechet(record.predicted, record.ground_truth);
  try {
    const auto e = orientation_errors(record.predicted, record.ground_truth).errors_deg;
    m.aoe_deg = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    m.maoe_deg = *std::max_element(e.begin(), e.end());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllUndefined) throw;
  }
  if (record.predicted_arrival && record.arrival_label) {
    m.arrival_correct = (*record.predicted_arrival >= 0.5) == *record.arrival_label;
  }
  return m;
}

MetricReport evaluate(std::span<const PredictionRecord> records, unsigned workers) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no prediction records to evaluate");
  std::vector<SampleMetrics> per(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) { per[i] = evaluate_record(records[i]); });

  MetricReport report;
  report.n_samples = static_cast<std::int64_t>(records.size());
  double aoe_sum = 0.0, maoe_sum = 0.0, ade_sum = 0.0, made_sum = 0.0;
  std::int64_t correct = 0;
  for (const auto& m : per) {
    ade_sum += m.ade_m;
    made_sum += m.made_m;
    if (m.aoe_deg) {
      aoe_sum += *m.aoe_deg;
      maoe_sum += *m.maoe_deg;
      ++report.n_orientation_samples;
    }
    if (m.arrival_correct) {
      ++report.n_arrival_samples;
      if (*m.arrival_correct) ++correct;
    }
  }
  const auto n = static_cast<double>(report.n_samples);
  report.mean_ade_m = ade_sum / n;
  report.mean_made_m = made_sum / n;
  if (report.n_orientation_samples > 0) {
    report.mean_aoe_deg = aoe_sum / static_cast<double>(report.n_orientation_samples);
    report.mean_maoe_deg = maoe_sum / static_cast<double>(report.n_orientation_samples);
  }
  if (report.n_arrival_samples > 0) {
    report.arrival_accuracy = static_cast<double>(correct) / static_cast<double>(report.n_arrival_samples);
  }
  return report;
}

}  // namespace navcurate
