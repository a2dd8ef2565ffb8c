#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bedscan/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "bedscan: G-code toolkit and scan-cycle simulator for an FDM "
      "platform with a rotating, kinematically coupled bed"};
  app.require_subcommand(1);

  // inject
  std::string inject_in, inject_out;
  int every_n = 1;
  int positions = 20;
  CLI::App* inject =
      app.add_subcommand("inject", "insert M102 scan words every N layers");
  inject->add_option("input", inject_in, "input G-code file")->required();
  inject->add_option("output", inject_out, "output G-code file")->required();
  inject->add_option("-n,--every-n-layers", every_n,
                     "insert after every N-th layer")
      ->check(CLI::PositiveNumber);
  inject->add_option("-p,--positions", positions,
                     "capture positions per scan (M102 P value)")
      ->check(CLI::PositiveNumber);

  // simulate
  bedscan::commands::SimulateOptions sim;
  std::string sim_gcode, sim_mesh, sim_out = "out";
  std::string sim_config, sim_printed;
  int sim_stride = 0;
  double p95 = 0.0, tmax = 0.0, missing = 0.0;
  std::uint64_t seed = 0;
  bool no_center = false;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a program against the virtual machine, scanning at "
                  "every M102 and classifying deviations");
  simulate->add_option("gcode", sim_gcode, "G-code program")->required();
  simulate->add_option("mesh", sim_mesh, "reference STL (the ideal part)")
      ->required();
  simulate->add_option("-o,--out-dir", sim_out, "output directory");
  simulate->add_option("-c,--config", sim_config, "config file");
  simulate->add_option("--printed-mesh", sim_printed,
                       "as-built STL sampled by the cameras (defaults to the "
                       "reference)");
  simulate->add_option("--stride", sim_stride, "pixel stride override")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--tolerable-p95", p95, "tolerable p95 threshold, mm");
  simulate->add_option("--terminal-max", tmax, "terminal max threshold, mm");
  simulate->add_option("--missing-fraction", missing,
                       "terminal missing fraction");
  simulate->add_option("--seed", seed, "random seed override");
  simulate->add_flag("--no-center", no_center,
                     "keep mesh coordinates instead of centering on the bed");
  simulate->add_flag("--allow-terminal", sim.allow_terminal,
                     "exit 0 even when a terminal fault is found");

  // analyze-coupling
  std::string analyze_config;
  CLI::App* analyze = app.add_subcommand(
      "analyze-coupling",
      "print the constraint-rank analysis and thermal sweep");
  analyze->add_option("-c,--config", analyze_config, "config file");

  CLI11_PARSE(app, argc, argv);

  if (inject->parsed()) {
    return bedscan::commands::cmd_inject(inject_in, inject_out, every_n,
                                         positions, std::cout, std::cerr);
  }
  if (simulate->parsed()) {
    sim.gcode_in = sim_gcode;
    sim.mesh_in = sim_mesh;
    sim.out_dir = sim_out;
    if (!sim_config.empty()) sim.config_path = sim_config;
    if (!sim_printed.empty()) sim.printed_mesh = sim_printed;
    if (simulate->count("--stride")) sim.stride = sim_stride;
    if (simulate->count("--tolerable-p95")) sim.tolerable_p95 = p95;
    if (simulate->count("--terminal-max")) sim.terminal_max = tmax;
    if (simulate->count("--missing-fraction")) sim.missing_fraction = missing;
    if (simulate->count("--seed")) sim.seed = seed;
    sim.center_mesh = !no_center;
    return bedscan::commands::cmd_simulate(sim, std::cout, std::cerr);
  }
  std::optional<std::filesystem::path> cfg;
  if (!analyze_config.empty()) cfg = analyze_config;
  return bedscan::commands::cmd_analyze_coupling(cfg, std::cout, std::cerr);
}
