#include "bedscan/coupling.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <sstream>

namespace bedscan::coupling {

namespace {

// Least-squares rigid transform mapping src onto dst.
RigidTransform kabsch(const std::array<Vec3d, 3>& src,
                      const std::array<Vec3d, 3>& dst) {
  Vec3d cs = Vec3d::Zero();
  Vec3d cd = Vec3d::Zero();
  for (int i = 0; i < 3; ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= 3.0;
  cd /= 3.0;
  Mat3d h = Mat3d::Zero();
  for (int i = 0; i < 3; ++i) {
    h += (src[i] - cs) * (dst[i] - cd).transpose();
  }
  Eigen::JacobiSVD<Mat3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3d d = Mat3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  const Mat3d r = svd.matrixV() * d * svd.matrixU().transpose();
  RigidTransform t = RigidTransform::Identity();
  t.linear() = r;
  t.translation() = cd - r * cs;
  return t;
}

void require_exact_constraint(const CouplingGeometry& geometry) {
  const ConstraintAnalysis analysis =
      analyze_constraints(contact_points(geometry));
  if (analysis.rank < 6) {
    std::ostringstream msg;
    msg << "underconstrained coupling geometry: wrench rank "
        << analysis.rank << " < 6";
    throw GeometryError(msg.str());
  }
}

std::array<Vec3d, 3> displaced_balls(const CouplingGeometry& geometry,
                                     const std::array<Vec3d, 3>& disp) {
  std::array<Vec3d, 3> d;
  for (int i = 0; i < 3; ++i) d[i] = geometry.ball_centers[i] + disp[i];
  return d;
}

BedPose solve_from_guess(const CouplingGeometry& geometry,
                         const std::array<Vec3d, 3>& displacements,
                         const RigidTransform& guess) {
  const std::array<Vec3d, 3> d = displaced_balls(geometry, displacements);
  std::array<Vec3d, 3> guessed;
  for (int i = 0; i < 3; ++i) guessed[i] = guess * d[i];
  const RigidTransform correction = kabsch(guessed, geometry.ball_centers);
  return correction * guess;
}

Vec3d nominal_plane_normal(const CouplingGeometry& geometry) {
  const auto& b = geometry.ball_centers;
  Vec3d n = (b[1] - b[0]).cross(b[2] - b[0]);
  const double len = n.norm();
  if (len < 1e-9) {
    throw GeometryError("ball centers are collinear");
  }
  n /= len;
  return n.z() < 0.0 ? Vec3d(-n) : n;
}

}  // namespace

CouplingGeometry CouplingGeometry::canonical(double circle_radius,
                                             double vee_half_angle,
                                             double ball_radius) {
  CouplingGeometry g;
  g.vee_half_angle = vee_half_angle;
  g.ball_radius = ball_radius;
  const double angles[3] = {kPi / 2.0, kPi * 7.0 / 6.0,
                            kPi * 11.0 / 6.0};
  for (int i = 0; i < 3; ++i) {
    g.ball_centers[i] = circle_radius * Vec3d(std::cos(angles[i]),
                                              std::sin(angles[i]), 0.0);
    g.vee_axes[i] = -g.ball_centers[i].normalized();
  }
  return g;
}

void CouplingGeometry::validate() const {
  for (const Vec3d& a : vee_axes) {
    if (std::abs(a.norm() - 1.0) > 1e-12) {
      throw GeometryError("vee axes must be unit length");
    }
  }
  if (!(vee_half_angle > 0.0) || !(vee_half_angle < 0.5 * kPi)) {
    throw GeometryError("vee half angle must lie in (0, pi/2)");
  }
  if (!(ball_radius > 0.0)) {
    throw GeometryError("ball radius must be positive");
  }
  nominal_plane_normal(*this);  // rejects collinear balls
}

bool CouplingGeometry::is_radial(double tol) const {
  for (int i = 0; i < 3; ++i) {
    const Vec2d axis_xy = vee_axes[i].head<2>();
    const Vec2d inward = -ball_centers[i].head<2>();
    if (axis_xy.norm() < 1e-12 || inward.norm() < 1e-12) return false;
    const double cosine =
        axis_xy.dot(inward) / (axis_xy.norm() * inward.norm());
    if (std::acos(std::clamp(cosine, -1.0, 1.0)) > tol) return false;
  }
  return true;
}

ContactSet contact_points(const CouplingGeometry& geometry) {
  geometry.validate();
  ContactSet contacts;
  for (int i = 0; i < 3; ++i) {
    const Vec3d& axis = geometry.vee_axes[i];
    Vec3d transverse = axis.cross(Vec3d::UnitZ());
    const double len = transverse.norm();
    if (len < 1e-9) {
      throw GeometryError("vee axis is vertical");
    }
    transverse /= len;
    const Vec3d up = transverse.cross(axis).normalized();
    const double c = std::cos(geometry.vee_half_angle);
    const double s = std::sin(geometry.vee_half_angle);
    for (int face = 0; face < 2; ++face) {
      const double sign = face == 0 ? -1.0 : 1.0;
      const Vec3d normal = c * up + sign * s * transverse;
      contacts[2 * i + face] = {
          geometry.ball_centers[i] - geometry.ball_radius * normal, normal, i};
    }
  }
  return contacts;
}

ConstraintAnalysis analyze_constraints(const ContactSet& contacts) {
  ConstraintAnalysis analysis;
  for (int i = 0; i < 6; ++i) {
    analysis.wrench_matrix.row(i).head<3>() = contacts[i].normal;
    analysis.wrench_matrix.row(i).tail<3>() =
        contacts[i].point.cross(contacts[i].normal);
  }
  Eigen::JacobiSVD<Mat6d> svd(analysis.wrench_matrix, Eigen::ComputeFullV);
  analysis.singular_values = svd.singularValues();
  analysis.smallest_singular_value = analysis.singular_values(5);
  const double sigma_max = analysis.singular_values(0);
  int rank = 0;
  for (int i = 0; i < 6; ++i) {
    if (sigma_max > 0.0 && analysis.singular_values(i) > kRankRelTol * sigma_max) {
      ++rank;
    }
  }
  analysis.rank = rank;
  analysis.free_twists = svd.matrixV().rightCols(6 - rank);
  return analysis;
}

double seating_residual(const CouplingGeometry& geometry,
                        const std::array<Vec3d, 3>& displacements,
                        const BedPose& pose) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3d seated =
        pose * (geometry.ball_centers[i] + displacements[i]);
    const Vec3d r = seated - geometry.ball_centers[i];
    const Vec3d perp = r - r.dot(geometry.vee_axes[i]) * geometry.vee_axes[i];
    worst = std::max(worst, perp.norm());
  }
  return worst;
}

BedPose solve_bed_pose(const CouplingGeometry& geometry,
                       const std::array<Vec3d, 3>& displacements) {
  require_exact_constraint(geometry);
  const BedPose pose = solve_from_guess(geometry, displacements,
                                        RigidTransform::Identity());
  const double residual = seating_residual(geometry, displacements, pose);
  if (residual > geometry.seating_tolerance) {
    std::ostringstream msg;
    msg << "overconstrained seating: residual " << residual
        << " mm exceeds tolerance " << geometry.seating_tolerance << " mm";
    throw GeometryError(msg.str());
  }
  return pose;
}

BedPose solve_bed_pose(const CouplingGeometry& geometry,
                       const std::array<double, 3>& slides) {
  std::array<Vec3d, 3> disp;
  for (int i = 0; i < 3; ++i) {
    // Positive slide moves the ball along its groove away from the
    // bed centre; axes point inward.
    disp[i] = -slides[i] * geometry.vee_axes[i];
  }
  return solve_bed_pose(geometry, disp);
}

ThermalGrowth thermal_growth(const CouplingGeometry& geometry, double delta_T,
                             double cte) {
  if (!(delta_T >= -50.0 && delta_T <= 250.0)) {
    throw ParameterError("delta_T outside [-50, 250] K");
  }
  require_exact_constraint(geometry);
  ThermalGrowth result;
  std::array<Vec3d, 3> disp;
  for (int i = 0; i < 3; ++i) {
    const double slide = cte * delta_T * geometry.ball_centers[i].norm();
    result.per_ball_slides[i] = slide;
    disp[i] = -slide * geometry.vee_axes[i];
  }
  // Off-radial grooves bind under growth; that is the diagnostic this
  // returns, so the seating-tolerance gate does not apply here.
  result.pose =
      solve_from_guess(geometry, disp, RigidTransform::Identity());
  result.seating_residual = seating_residual(geometry, disp, result.pose);
  result.grown = geometry;
  for (int i = 0; i < 3; ++i) {
    result.grown.ball_centers[i] = geometry.ball_centers[i] + disp[i];
  }
  result.center_displacement = result.pose.translation().norm();

  const Vec3d n = nominal_plane_normal(geometry);
  const double c = n.dot(geometry.ball_centers[0]);
  double warp = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3d seated = result.pose * result.grown.ball_centers[i];
    warp = std::max(warp, std::abs(n.dot(seated) - c));
  }
  result.out_of_plane_warp = warp;
  return result;
}

Plane leveling_plane(const std::array<double, 3>& screw_heights,
                     const CouplingGeometry& geometry) {
  nominal_plane_normal(geometry);  // rejects collinear balls
  std::array<Vec3d, 3> tops;
  for (int i = 0; i < 3; ++i) {
    tops[i] = geometry.ball_centers[i] +
              (geometry.ball_radius + screw_heights[i]) * Vec3d::UnitZ();
  }
  Vec3d n = (tops[1] - tops[0]).cross(tops[2] - tops[0]);
  const double len = n.norm();
  if (len < 1e-9) {
    throw GeometryError("leveling points are collinear");
  }
  n /= len;
  if (n.z() < 0.0) n = -n;
  return {n, n.dot(tops[0])};
}

ReseatReport reseat_repeatability(const CouplingGeometry& geometry,
                                  double perturbation_scale, int trials,
                                  std::uint64_t seed) {
  require_exact_constraint(geometry);
  ReseatReport report;
  report.trials = std::max(trials, 0);
  if (report.trials == 0) return report;

  const std::array<Vec3d, 3> zero{Vec3d::Zero(), Vec3d::Zero(), Vec3d::Zero()};
  const BedPose nominal =
      solve_from_guess(geometry, zero, RigidTransform::Identity());

  double radius = 0.0;
  for (const Vec3d& b : geometry.ball_centers) radius += b.norm();
  radius = std::max(radius / 3.0, 1.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  for (int trial = 0; trial < report.trials; ++trial) {
    Vec3d axis(gauss(rng), gauss(rng), gauss(rng));
    if (axis.norm() < 1e-9) axis = Vec3d::UnitZ();
    axis.normalize();
    const Vec3d offset(uniform(rng) * perturbation_scale,
                       uniform(rng) * perturbation_scale,
                       uniform(rng) * perturbation_scale);
    // A perturbation_scale-mm arc at the coupling radius.
    const double angle = uniform(rng) * perturbation_scale / radius;
    RigidTransform guess = RigidTransform::Identity();
    guess.translate(offset);
    guess.rotate(Eigen::AngleAxisd(angle, axis));

    const BedPose pose = solve_from_guess(geometry, zero, guess);
    const double dt = (pose.translation() - nominal.translation()).norm();
    const double dr =
        rotation_angle(pose.linear().transpose() * nominal.linear());
    report.max_translation_deviation =
        std::max(report.max_translation_deviation, dt);
    report.max_rotation_deviation = std::max(report.max_rotation_deviation, dr);
  }
  return report;
}

}  // namespace bedscan::coupling
