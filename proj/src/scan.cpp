#include "bedscan/scan.hpp"

#include <cmath>

namespace bedscan::scan {

ScanPlan plan_scan(int positions) {
  if (positions < 1) {
    throw ParameterError("scan positions must be >= 1");
  }
  ScanPlan plan;
  plan.positions = positions;
  plan.bed_angles.reserve(positions);
  plan.capture_order.reserve(2 * static_cast<std::size_t>(positions));
  for (int k = 0; k < positions; ++k) {
    plan.bed_angles.push_back(kTwoPi * k / positions);
    plan.capture_order.emplace_back(k, CameraName::Lower);
    plan.capture_order.emplace_back(k, CameraName::Upper);
  }
  return plan;
}

std::vector<ScanPhase> canonical_phase_sequence(int positions) {
  using Kind = ScanPhase::Kind;
  std::vector<ScanPhase> seq;
  seq.push_back({Kind::Printing});
  seq.push_back({Kind::LoweringZ});
  seq.push_back({Kind::Disengaged});
  for (int k = 0; k < positions; ++k) {
    seq.push_back({Kind::Rotating, k});
    seq.push_back({Kind::Capturing, k, CameraName::Lower});
    seq.push_back({Kind::Capturing, k, CameraName::Upper});
  }
  seq.push_back({Kind::Reversing});
  seq.push_back({Kind::Reengaging});
  seq.push_back({Kind::RaisingZ});
  seq.push_back({Kind::Printing});
  return seq;
}

RigidTransform effective_camera_pose(const RigidTransform& pose_world,
                                     double bed_angle, double scan_z,
                                     const Vec2d& bed_center) {
  const RigidTransform unspin = rot_z_about(-bed_angle, bed_center);
  RigidTransform lower = RigidTransform::Identity();
  lower.translation() = Vec3d(0.0, 0.0, -scan_z);
  return lower * unspin * pose_world;
}

ScanRecord execute_scan(MachineState& state, int positions,
                        const MachineConfig& machine,
                        const coupling::CouplingGeometry& geometry,
                        const CaptureFn& capture_fn) {
  using Kind = ScanPhase::Kind;
  if (state.phase != MachinePhase::Printing) {
    throw StateError("scan requested while a scan cycle is already running");
  }
  const coupling::ConstraintAnalysis analysis =
      coupling::analyze_constraints(coupling::contact_points(geometry));
  if (analysis.rank < 6) {
    throw MechanismError(
        "coupling is not exactly constrained (wrench rank " +
        std::to_string(analysis.rank) + "); bed rotation would be ambiguous");
  }
  const ScanPlan plan = plan_scan(positions);

  const MachineState pre_scan = state;
  ScanRecord record;
  record.layer = state.current_layer;
  record.scan_z = machine.scan_bed_height;
  record.positions = positions;
  record.captures.reserve(plan.capture_order.size());

  auto enter = [&](ScanPhase phase) { record.phase_trace.push_back(phase); };

  enter({Kind::Printing});
  state.phase = MachinePhase::Scanning;
  enter({Kind::LoweringZ});
  enter({Kind::Disengaged});

  const Vec2d bed_center = machine.bed_center();
  for (int k = 0; k < positions; ++k) {
    enter({Kind::Rotating, k});
    record.rotation_increments.push_back(k == 0 ? 0 : 1);
    const double angle = plan.bed_angles[static_cast<std::size_t>(k)];
    state.bed_angle = angle;
    for (CameraName camera : {CameraName::Lower, CameraName::Upper}) {
      enter({Kind::Capturing, k, camera});
      const CameraMount& mount = camera == CameraName::Lower
                                     ? machine.lower_camera
                                     : machine.upper_camera;
      CaptureRecord capture;
      capture.bed_angle = angle;
      capture.camera = camera;
      capture.camera_pose = effective_camera_pose(
          mount.pose_world, angle, machine.scan_bed_height, bed_center);
      capture.points = capture_fn(camera, capture.camera_pose, angle);
      record.captures.push_back(std::move(capture));
    }
  }

  enter({Kind::Reversing});
  record.rotation_increments.push_back(-(positions - 1));
  state.bed_angle = 0.0;
  enter({Kind::Reengaging});
  enter({Kind::RaisingZ});
  state = pre_scan;  // exact restoration: position, temps, phase, layer
  enter({Kind::Printing});
  return record;
}

}  // namespace bedscan::scan
