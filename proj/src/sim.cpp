#include "bedscan/sim.hpp"

#include <cmath>
#include <string>

namespace bedscan::sim {

namespace {

int scan_positions(const gcode::Command& cmd) {
  return static_cast<int>(cmd.param('P'));
}

}  // namespace

RunResult run_program(const gcode::Program& program, const SimConfig& config,
                      const Bvh& printed, const Bvh& reference) {
  RunResult result;
  MachineState& state = result.final_state;
  const std::vector<int> layer_of = gcode::detect_layers(program);

  for (std::size_t i = 0; i < program.commands.size(); ++i) {
    const gcode::Command& cmd = program.commands[i];
    state.current_layer = layer_of[i];
    switch (cmd.kind) {
      case gcode::CommandKind::LinearMove: {
        Vec3d target = state.position;
        if (cmd.has('X')) target.x() = cmd.param('X');
        if (cmd.has('Y')) target.y() = cmd.param('Y');
        if (cmd.has('Z')) target.z() = cmd.param('Z');
        try {
          state.position = clamp_move(target, config.machine);
        } catch (const LimitError& e) {
          throw LimitError("line " + std::to_string(cmd.source_line) + ": " +
                           e.what());
        }
        break;
      }
      case gcode::CommandKind::Home:
        state.position = Vec3d::Zero();
        break;
      case gcode::CommandKind::SetHotendTemp:
        state.hotend_temp = cmd.param('S', state.hotend_temp);
        break;
      case gcode::CommandKind::SetBedTemp:
        state.bed_temp = cmd.param('S', state.bed_temp);
        break;
      case gcode::CommandKind::ScanCapture: {
        const double print_height = state.position.z();
        const scan::CaptureFn capture_fn =
            [&](CameraName camera, const RigidTransform& pose, double) {
              const CameraMount& mount = camera == CameraName::Lower
                                             ? config.machine.lower_camera
                                             : config.machine.upper_camera;
              std::vector<Vec3d> points = raycast_capture(
                  printed, pose, mount.intrinsics, config.scan.stride);
              return clip_to_height(points, print_height,
                                    config.scan.clip_tolerance);
            };
        ScanOutcome outcome;
        outcome.source_line = cmd.source_line;
        try {
          outcome.record =
              scan::execute_scan(state, scan_positions(cmd), config.machine,
                                 config.coupling, capture_fn);
        } catch (const StateError& e) {
          throw StateError("line " + std::to_string(cmd.source_line) + ": " +
                           e.what());
        }
        outcome.cloud =
            merge_scan(outcome.record.captures, outcome.record.layer);
        outcome.report = defect::deviation_report(
            outcome.cloud, reference, config.defect.inlier_tolerance);
        outcome.fault = defect::classify(outcome.report, config.defect.rules);
        if (static_cast<int>(outcome.fault.verdict) >
            static_cast<int>(result.worst_verdict)) {
          result.worst_verdict = outcome.fault.verdict;
        }
        result.scans.push_back(std::move(outcome));
        break;
      }
      case gcode::CommandKind::Comment:
      case gcode::CommandKind::Other:
        break;
    }
  }
  return result;
}

}  // namespace bedscan::sim
