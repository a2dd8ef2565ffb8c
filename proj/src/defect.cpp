#include "bedscan/defect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bedscan::defect {

void FaultRules::validate() const {
  if (!(tolerable_p95 > 0.0) || !(terminal_max > 0.0) ||
      !(terminal_missing_fraction > 0.0)) {
    throw ConfigError("fault thresholds must be strictly positive");
  }
  if (tolerable_p95 > terminal_max) {
    throw ConfigError("tolerable_p95 must not exceed terminal_max");
  }
  if (terminal_missing_fraction > 1.0) {
    throw ConfigError("terminal_missing_fraction must be at most 1");
  }
}

double point_to_mesh_distance(const Vec3d& point, const Bvh& bvh) {
  if (bvh.mesh().triangle_count() == 0) {
    throw DomainError("point-to-mesh distance requires a non-empty mesh");
  }
  return bvh.distance(point);
}

DeviationReport deviation_report(const PointCloud& cloud, const Bvh& bvh,
                                 double tolerance) {
  if (bvh.mesh().triangle_count() == 0) {
    throw DomainError("deviation report requires a non-empty mesh");
  }
  DeviationReport report;
  report.tolerance = tolerance;
  if (cloud.points.empty()) {
    return report;  // zeroed stats, inlier fraction 1 by definition
  }

  report.per_point_distance.reserve(cloud.points.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t inliers = 0;
  for (const Vec3d& p : cloud.points) {
    const double d = bvh.distance(p);
    report.per_point_distance.push_back(d);
    report.max = std::max(report.max, d);
    sum += d;
    sum_sq += d * d;
    if (d <= tolerance) ++inliers;
  }
  const double n = static_cast<double>(report.per_point_distance.size());
  report.mean = sum / n;
  report.rms = std::sqrt(sum_sq / n);
  report.inlier_fraction = static_cast<double>(inliers) / n;

  std::vector<double> sorted = report.per_point_distance;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t index = static_cast<std::size_t>(std::max(
      0.0, std::ceil(0.95 * n) - 1.0));
  report.p95 = sorted[std::min(index, sorted.size() - 1)];
  return report;
}

FaultClassification classify(const DeviationReport& report,
                             const FaultRules& rules) {
  rules.validate();
  FaultClassification result;
  if (report.max > rules.terminal_max) {
    result.verdict = Verdict::Terminal;
    result.rule = "max";
    result.statistic = report.max;
    result.threshold = rules.terminal_max;
    return result;
  }
  const double required_inliers = 1.0 - rules.terminal_missing_fraction;
  if (report.inlier_fraction < required_inliers) {
    result.verdict = Verdict::Terminal;
    result.rule = "missing";
    result.statistic = report.inlier_fraction;
    result.threshold = required_inliers;
    return result;
  }
  if (report.p95 > rules.tolerable_p95) {
    result.verdict = Verdict::Tolerable;
    result.rule = "p95";
    result.statistic = report.p95;
    result.threshold = rules.tolerable_p95;
    return result;
  }
  return result;  // Nominal
}

}  // namespace bedscan::defect
