#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "bedscan/config.hpp"

namespace bedscan::commands {

// Exit codes shared by the CLI and tests.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTerminalFault = 2;

// Parse, inject M102 P`positions` every `every_n_layers` layers, write
// the result, and report the insertion count.
int cmd_inject(const std::filesystem::path& gcode_in,
               const std::filesystem::path& gcode_out, int every_n_layers,
               int positions, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::filesystem::path gcode_in;
  std::filesystem::path mesh_in;       // reference (ideal) surface
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> printed_mesh;  // as-built surface
  std::optional<int> stride;
  std::optional<double> tolerable_p95;
  std::optional<double> terminal_max;
  std::optional<double> missing_fraction;
  std::optional<std::uint64_t> seed;
  bool center_mesh = true;     // place mesh on the bed centre
  bool allow_terminal = false; // exit 0 even on a terminal verdict
};

// Runs the program end to end; writes per-scan PLY/XYZ clouds and a
// JSON run manifest. Exit status encodes the worst fault verdict.
int cmd_simulate(const SimulateOptions& options, std::ostream& out,
                 std::ostream& err);

// Prints the wrench-matrix constraint analysis and a thermal sweep
// table for the configured coupling.
int cmd_analyze_coupling(
    const std::optional<std::filesystem::path>& config_path, std::ostream& out,
    std::ostream& err);

}  // namespace bedscan::commands
