#pragma once

#include <optional>
#include <vector>

#include "bedscan/bvh.hpp"
#include "bedscan/config.hpp"
#include "bedscan/defect.hpp"
#include "bedscan/gcode.hpp"
#include "bedscan/scan.hpp"

namespace bedscan::sim {

// Everything one M102 produced: the cycle record, the merged bed-frame
// cloud, and its deviation against the reference surface.
struct ScanOutcome {
  scan::ScanRecord record;
  PointCloud cloud;
  defect::DeviationReport report;
  defect::FaultClassification fault;
  int source_line = 0;
};

struct RunResult {
  MachineState final_state;
  std::vector<ScanOutcome> scans;
  defect::Verdict worst_verdict = defect::Verdict::Nominal;
};

// Executes a parsed program against the virtual machine. `printed` is
// the as-built surface sampled by the depth captures; `reference` is
// the ideal surface deviations are measured against (pass the same tree
// for a defect-free run). Limit and state errors carry the offending
// source line.
RunResult run_program(const gcode::Program& program, const SimConfig& config,
                      const Bvh& printed, const Bvh& reference);

}  // namespace bedscan::sim
