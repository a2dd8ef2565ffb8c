#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bedscan/capture.hpp"
#include "bedscan/coupling.hpp"
#include "bedscan/kinematics.hpp"

namespace bedscan::scan {

// P equally spaced bed positions, two captures (lower then upper
// camera) per position.
struct ScanPlan {
  int positions = 0;
  std::vector<double> bed_angles;  // 2*pi*k / positions
  std::vector<std::pair<int, CameraName>> capture_order;
};

ScanPlan plan_scan(int positions);

struct ScanPhase {
  enum class Kind {
    Printing,
    LoweringZ,
    Disengaged,
    Rotating,
    Capturing,
    Reversing,
    Reengaging,
    RaisingZ,
  };

  Kind kind = Kind::Printing;
  int position = -1;  // k for Rotating/Capturing
  CameraName camera = CameraName::Lower;  // Capturing only

  bool operator==(const ScanPhase&) const = default;
};

// The legal phase cycle for a P-position scan, Printing through
// Printing.
std::vector<ScanPhase> canonical_phase_sequence(int positions);

// One executed scan cycle. Rotation increments are kept as exact
// multiples of 2*pi/positions so the net rotation check is integer math.
struct ScanRecord {
  int layer = 0;
  double scan_z = 0.0;  // chassis height of the bed top during the scan
  int positions = 0;
  std::vector<CaptureRecord> captures;
  std::vector<ScanPhase> phase_trace;
  std::vector<int> rotation_increments;  // in units of 2*pi/positions

  long net_rotation_units() const {
    long s = 0;
    for (int d : rotation_increments) s += d;
    return s;
  }
};

// Camera pose in the bed frame for a bed rotated by `bed_angle`:
// rotating the bed by +theta about its centre axis is equivalent to
// orbiting the camera by -theta about that axis, then lowering by the
// bed height: pose_bed = T_z(-scan_z) * R_z(-theta) * pose_world.
RigidTransform effective_camera_pose(const RigidTransform& pose_world,
                                     double bed_angle, double scan_z,
                                     const Vec2d& bed_center);

using CaptureFn = std::function<std::vector<Vec3d>(
    CameraName camera, const RigidTransform& camera_pose_bed,
    double bed_angle)>;

// Runs the full scan cycle: disengage, rotate through P positions
// capturing from both cameras, reverse, re-engage, resume printing.
// `state` is restored exactly (position, temperatures, bed angle zero,
// phase Printing). Throws StateError if already scanning and
// MechanismError if the coupling is not exactly constrained.
ScanRecord execute_scan(MachineState& state, int positions,
                        const MachineConfig& machine,
                        const coupling::CouplingGeometry& geometry,
                        const CaptureFn& capture_fn);

}  // namespace bedscan::scan
