#pragma once

#include <array>
#include <cstdint>

#include "bedscan/errors.hpp"
#include "bedscan/types.hpp"

namespace bedscan::coupling {

// Three-ball / three-vee kinematic coupling, expressed in the bed frame:
// origin at the bed centre, +Z up, balls nominally on a circle of radius
// `circle_radius` in the z = 0 plane. Vee axes are the groove sliding
// directions and nominally point from each ball toward the bed centre.
struct CouplingGeometry {
  std::array<Vec3d, 3> ball_centers;
  std::array<Vec3d, 3> vee_axes;
  double vee_half_angle = kPi / 4.0;  // face inclination from vertical
  double ball_radius = 6.0;
  std::array<double, 3> screw_heights{0.0, 0.0, 0.0};
  double seating_tolerance = 0.05;  // mm, max admissible seating residual

  // Canonical radial layout: balls equally spaced on a circle, each vee
  // axis pointing at the centre.
  static CouplingGeometry canonical(double circle_radius = 140.0,
                                    double vee_half_angle = kPi / 4.0,
                                    double ball_radius = 6.0);

  // Unit axes, non-collinear balls, half angle in (0, pi/2).
  void validate() const;

  // True when every vee axis, projected to the bed plane, points from its
  // ball toward the bed centre within `tol` radians.
  bool is_radial(double tol = 1e-9) const;
};

struct Contact {
  Vec3d point;
  Vec3d normal;  // unit, pointing into the bed (positive z component)
  int ball = 0;
};

using ContactSet = std::array<Contact, 6>;

using BedPose = RigidTransform;

// Relative singular-value threshold below which a direction counts as
// unconstrained.
inline constexpr double kRankRelTol = 1e-9;

struct ConstraintAnalysis {
  Mat6d wrench_matrix;       // rows: [normal, point x normal]
  int rank = 0;
  double smallest_singular_value = 0.0;
  Vec6d singular_values = Vec6d::Zero();
  // Right singular vectors of the zeroed singular values: the twists
  // [v; w] the contacts fail to constrain. Columns = 6 - rank.
  Eigen::Matrix<double, 6, Eigen::Dynamic> free_twists;
};

// Two tangent contacts per ball against the two vee faces. Throws
// GeometryError for degenerate half angles, vertical axes, or a
// non-positive ball radius.
ContactSet contact_points(const CouplingGeometry& geometry);

// Builds the 6x6 wrench matrix and reports its numerical rank; rank 6
// means the coupling is exactly constrained.
ConstraintAnalysis analyze_constraints(const ContactSet& contacts);

// Rigid pose seating displaced balls back onto their nominal vees,
// solved by least-squares rigid registration of the displaced ball
// centres onto the nominal seats. `displacements` are bed-frame offsets
// of each ball from its nominal centre. Throws GeometryError
// ("underconstrained") for rank-deficient geometry and GeometryError
// ("overconstrained seating", with the residual) when the displacement
// field cannot be seated within `seating_tolerance`.
BedPose solve_bed_pose(const CouplingGeometry& geometry,
                       const std::array<Vec3d, 3>& displacements);

// Scalar convenience: each ball slides `slides[i]` millimetres along its
// vee axis, positive away from the bed centre.
BedPose solve_bed_pose(const CouplingGeometry& geometry,
                       const std::array<double, 3>& slides);

// Max perpendicular distance of the posed balls from their groove lines;
// zero for a kinematically consistent displacement field.
double seating_residual(const CouplingGeometry& geometry,
                        const std::array<Vec3d, 3>& displacements,
                        const BedPose& pose);

struct ThermalGrowth {
  CouplingGeometry grown;  // geometry with displaced ball centres
  BedPose pose;            // solved seating pose of the grown bed
  std::array<double, 3> per_ball_slides{};  // mm along each vee axis,
                                            // outward positive
  double center_displacement = 0.0;  // |pose * origin|
  double out_of_plane_warp = 0.0;    // max ball deviation from nominal plane
  double seating_residual = 0.0;     // binding indicator; 0 for radial vees
};

// Radial thermal expansion of the ball pattern: each ball slides
// cte * delta_T * |center distance| along its vee axis (outward for
// positive delta_T), then the bed is re-seated. Diagnostic: off-radial
// grooves bind rather than error, reported through the pose motion and
// residual. delta_T outside [-50, 250] K throws ParameterError.
ThermalGrowth thermal_growth(const CouplingGeometry& geometry, double delta_T,
                             double cte);

struct Plane {
  Vec3d normal;  // unit, positive z orientation
  double offset = 0.0;  // normal . x == offset
};

// Plane through the three ball tops raised by the leveling screws.
Plane leveling_plane(const std::array<double, 3>& screw_heights,
                     const CouplingGeometry& geometry);

struct ReseatReport {
  int trials = 0;
  double max_translation_deviation = 0.0;  // mm
  double max_rotation_deviation = 0.0;     // rad
};

// Re-runs the seating solve from `trials` randomly perturbed initial
// poses (rigid offsets of magnitude `perturbation_scale`) and reports the
// worst-case deviation from the unperturbed pose. The idealized coupling
// is deterministic, so deviations are solver noise, not physics.
ReseatReport reseat_repeatability(const CouplingGeometry& geometry,
                                  double perturbation_scale, int trials,
                                  std::uint64_t seed = 12345);

}  // namespace bedscan::coupling
