#pragma once

#include <string>

#include "bedscan/bvh.hpp"
#include "bedscan/capture.hpp"
#include "bedscan/errors.hpp"
#include "bedscan/mesh.hpp"

namespace bedscan::defect {

// Unsigned distances from captured points to the reference surface.
// p95 is the smallest recorded distance with at least 95 % of points at
// or below it. An empty cloud yields zeroed stats and inlier fraction 1.
struct DeviationReport {
  std::vector<double> per_point_distance;
  double max = 0.0;
  double mean = 0.0;
  double rms = 0.0;
  double p95 = 0.0;
  double inlier_fraction = 1.0;
  double tolerance = 0.0;  // inlier cutoff the fractions were computed at
};

enum class Verdict { Nominal, Tolerable, Terminal };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Nominal: return "nominal";
    case Verdict::Tolerable: return "tolerable";
    default: return "terminal";
  }
}

struct FaultClassification {
  Verdict verdict = Verdict::Nominal;
  std::string rule;        // which rule fired ("max", "missing", "p95"), empty for nominal
  double statistic = 0.0;  // triggering value
  double threshold = 0.0;
};

struct FaultRules {
  double tolerable_p95 = 0.3;            // mm
  double terminal_max = 1.0;             // mm
  double terminal_missing_fraction = 0.5;

  void validate() const;  // positive, tolerable_p95 <= terminal_max
};

// Exact minimum Euclidean distance from the point to any triangle.
// Throws DomainError for an empty mesh.
double point_to_mesh_distance(const Vec3d& point, const Bvh& bvh);

DeviationReport deviation_report(const PointCloud& cloud, const Bvh& bvh,
                                 double tolerance);

// Terminal if max > terminal_max or the inlier fraction drops below
// 1 - terminal_missing_fraction; else Tolerable if p95 > tolerable_p95;
// else Nominal.
FaultClassification classify(const DeviationReport& report,
                             const FaultRules& rules);

}  // namespace bedscan::defect
