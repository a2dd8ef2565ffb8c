#include "bedscan/commands.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "bedscan/gcode.hpp"
#include "bedscan/mesh.hpp"
#include "bedscan/pointcloud_io.hpp"
#include "bedscan/sim.hpp"

namespace bedscan::commands {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open: " + path.string());
  }
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

ordered_json pose_to_json(const RigidTransform& pose) {
  ordered_json rows = ordered_json::array();
  const Eigen::Matrix4d m = pose.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      rows.push_back(m(r, c));
    }
  }
  return rows;
}

ordered_json report_to_json(const defect::DeviationReport& report) {
  return ordered_json{{"points", report.per_point_distance.size()},
                      {"max", report.max},
                      {"mean", report.mean},
                      {"rms", report.rms},
                      {"p95", report.p95},
                      {"inlier_fraction", report.inlier_fraction},
                      {"inlier_tolerance", report.tolerance}};
}

ordered_json fault_to_json(const defect::FaultClassification& fault) {
  ordered_json j{{"verdict", defect::to_string(fault.verdict)}};
  if (!fault.rule.empty()) {
    j["rule"] = fault.rule;
    j["statistic"] = fault.statistic;
    j["threshold"] = fault.threshold;
  }
  return j;
}

}  // namespace

int cmd_inject(const std::filesystem::path& gcode_in,
               const std::filesystem::path& gcode_out, int every_n_layers,
               int positions, std::ostream& out, std::ostream& err) {
  try {
    const gcode::Program program = gcode::parse_program(read_file(gcode_in));
    const gcode::InjectionConfig cfg{every_n_layers, positions};
    const gcode::Program injected = gcode::inject_scan_words(program, cfg);
    const std::size_t inserted =
        injected.commands.size() - program.commands.size();

    std::ofstream sink(gcode_out, std::ios::binary);
    if (!sink) {
      throw Error("cannot open for writing: " + gcode_out.string());
    }
    sink << gcode::serialize_program(injected);
    out << inserted << " scan words inserted\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "inject: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out,
                 std::ostream& err) {
  try {
    SimConfig config = options.config_path ? SimConfig::load(*options.config_path)
                                           : SimConfig::defaults();
    if (options.stride) config.scan.stride = *options.stride;
    if (options.tolerable_p95) {
      config.defect.rules.tolerable_p95 = *options.tolerable_p95;
    }
    if (options.terminal_max) {
      config.defect.rules.terminal_max = *options.terminal_max;
    }
    if (options.missing_fraction) {
      config.defect.rules.terminal_missing_fraction =
          *options.missing_fraction;
    }
    if (options.seed) config.seed = *options.seed;
    config.defect.rules.validate();
    if (config.scan.stride < 1) {
      throw ConfigError("stride must be >= 1");
    }

    const gcode::Program program =
        gcode::parse_program(read_file(options.gcode_in));

    TriangleMesh reference = load_stl(options.mesh_in);
    RigidTransform placement = RigidTransform::Identity();
    if (options.center_mesh) {
      const Vec3d c = reference.bounds.center();
      const Vec2d bed = config.machine.bed_center();
      placement.translation() =
          Vec3d(bed.x() - c.x(), bed.y() - c.y(), -reference.bounds.min.z());
    }
    reference = transformed(reference, placement);
    // The as-built surface shares the reference placement so deviations
    // measure shape, not placement.
    TriangleMesh printed =
        options.printed_mesh
            ? transformed(load_stl(*options.printed_mesh), placement)
            : reference;

    const Bvh reference_tree(reference);
    const Bvh printed_tree(printed);

    std::filesystem::create_directories(options.out_dir);
    const sim::RunResult result =
        sim::run_program(program, config, printed_tree, reference_tree);

    ordered_json manifest;
    manifest["config"] = config.to_key_values();
    manifest["inputs"] = ordered_json{
        {"gcode", {{"path", options.gcode_in.string()},
                   {"digest", io::digest_file(options.gcode_in)}}},
        {"mesh", {{"path", options.mesh_in.string()},
                  {"digest", io::digest_file(options.mesh_in)}}},
    };
    if (options.printed_mesh) {
      manifest["inputs"]["printed_mesh"] = {
          {"path", options.printed_mesh->string()},
          {"digest", io::digest_file(*options.printed_mesh)}};
    }

    ordered_json scans = ordered_json::array();
    int scan_index = 0;
    for (const sim::ScanOutcome& outcome : result.scans) {
      ++scan_index;
      std::ostringstream stem;
      stem << "scan_" << std::setw(4) << std::setfill('0') << scan_index;
      const std::string ply_name = stem.str() + ".ply";
      io::write_ply(options.out_dir / ply_name, outcome.cloud);
      io::write_xyz(options.out_dir / (stem.str() + ".xyz"), outcome.cloud);

      ordered_json captures = ordered_json::array();
      for (const CaptureRecord& capture : outcome.record.captures) {
        captures.push_back(
            ordered_json{{"bed_angle", capture.bed_angle},
                         {"camera", to_string(capture.camera)},
                         {"pose", pose_to_json(capture.camera_pose)},
                         {"points", capture.points.size()}});
      }
      scans.push_back(
          ordered_json{{"layer", outcome.record.layer},
                       {"positions", outcome.record.positions},
                       {"source_line", outcome.source_line},
                       {"scan_z", outcome.record.scan_z},
                       {"point_file", ply_name},
                       {"captures", captures},
                       {"deviation", report_to_json(outcome.report)},
                       {"fault", fault_to_json(outcome.fault)}});

      out << "scan " << scan_index << " (layer " << outcome.record.layer
          << "): " << outcome.cloud.size() << " points, max deviation "
          << outcome.report.max << " mm, verdict "
          << defect::to_string(outcome.fault.verdict) << '\n';
    }
    manifest["scans"] = scans;
    manifest["summary"] =
        ordered_json{{"scan_count", result.scans.size()},
                     {"verdict", defect::to_string(result.worst_verdict)}};

    std::ofstream sink(options.out_dir / "manifest.json", std::ios::binary);
    sink << manifest.dump(2) << '\n';

    out << "verdict: " << defect::to_string(result.worst_verdict) << '\n';
    if (result.worst_verdict == defect::Verdict::Terminal &&
        !options.allow_terminal) {
      return kExitTerminalFault;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_analyze_coupling(
    const std::optional<std::filesystem::path>& config_path, std::ostream& out,
    std::ostream& err) {
  try {
    const SimConfig config =
        config_path ? SimConfig::load(*config_path) : SimConfig::defaults();
    const coupling::ConstraintAnalysis analysis =
        coupling::analyze_constraints(
            coupling::contact_points(config.coupling));

    out << "wrench matrix rank: " << analysis.rank << '\n';
    out << "singular values:";
    for (int i = 0; i < 6; ++i) out << ' ' << analysis.singular_values(i);
    out << '\n';
    out << "smallest singular value: " << analysis.smallest_singular_value
        << '\n';
    if (analysis.rank < 6) {
      out << "warning: coupling is underconstrained (rank " << analysis.rank
          << " < 6)\n";
      for (int c = 0; c < analysis.free_twists.cols(); ++c) {
        const Vec6d twist = analysis.free_twists.col(c);
        out << "  free twist " << c << ": v = (" << twist(0) << ", "
            << twist(1) << ", " << twist(2) << "), w = (" << twist(3) << ", "
            << twist(4) << ", " << twist(5) << ")\n";
      }
      return kExitOk;
    }

    out << "\nthermal sweep (cte = " << config.cte << " 1/K)\n";
    out << std::setw(8) << "dT [K]" << std::setw(16) << "slide [mm]"
        << std::setw(22) << "center disp [mm]" << std::setw(16) << "warp [mm]"
        << '\n';
    for (int dT = 0; dT <= 200; dT += 20) {
      const coupling::ThermalGrowth growth =
          coupling::thermal_growth(config.coupling, dT, config.cte);
      out << std::setw(8) << dT << std::setw(16)
          << growth.per_ball_slides[0] << std::setw(22)
          << growth.center_displacement << std::setw(16)
          << growth.out_of_plane_warp << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "analyze-coupling: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace bedscan::commands
