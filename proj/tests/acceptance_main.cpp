// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bedscan/commands.hpp"
#include "bedscan/coupling.hpp"
#include "bedscan/defect.hpp"
#include "bedscan/gcode.hpp"
#include "bedscan/kinematics.hpp"
#include "bedscan/mesh.hpp"
#include "bedscan/scan.hpp"
#include "bedscan/sim.hpp"

using namespace bedscan;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

std::string fixture(const std::string& name) {
  return std::string(BEDSCAN_FIXTURE_DIR) + "/" + name;
}

// ---------------------------------------------------------------------
// shared fixtures

// Cube of the given edge, each face an n x n grid; deduplicated seams.
TriangleMesh subdivided_cube(double edge, int n, const Vec3d& center) {
  TriangleMesh mesh;
  std::map<std::array<long long, 3>, std::uint32_t> index;
  const double h = edge / 2.0;
  auto add = [&](const Vec3d& v) {
    const std::array<long long, 3> key{std::llround(v.x() * 1e6),
                                       std::llround(v.y() * 1e6),
                                       std::llround(v.z() * 1e6)};
    auto [it, inserted] =
        index.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(v);
    return it->second;
  };
  const std::array<std::array<Vec3d, 3>, 6> faces = {{
      {Vec3d(0, 0, 1), Vec3d(1, 0, 0), Vec3d(0, 1, 0)},
      {Vec3d(0, 0, -1), Vec3d(0, 1, 0), Vec3d(1, 0, 0)},
      {Vec3d(1, 0, 0), Vec3d(0, 1, 0), Vec3d(0, 0, 1)},
      {Vec3d(-1, 0, 0), Vec3d(0, 0, 1), Vec3d(0, 1, 0)},
      {Vec3d(0, 1, 0), Vec3d(0, 0, 1), Vec3d(1, 0, 0)},
      {Vec3d(0, -1, 0), Vec3d(1, 0, 0), Vec3d(0, 0, 1)},
  }};
  for (const auto& [normal, u, v] : faces) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto corner = [&](int di, int dj) {
          return add(center + h * normal + (-h + edge * (i + di) / n) * u +
                     (-h + edge * (j + dj) / n) * v);
        };
        mesh.triangles.push_back({corner(0, 0), corner(1, 0), corner(1, 1)});
        mesh.triangles.push_back({corner(0, 0), corner(1, 1), corner(0, 1)});
      }
    }
  }
  mesh.recompute_bounds();
  return mesh;
}

TriangleMesh uv_sphere(double radius, int rings, int segments) {
  TriangleMesh mesh;
  std::vector<std::vector<std::uint32_t>> ring_index(rings);
  for (int i = 0; i < rings; ++i) {
    const double theta = kPi * i / (rings - 1);
    if (i == 0 || i == rings - 1) {
      ring_index[i].push_back(static_cast<std::uint32_t>(mesh.vertices.size()));
      mesh.vertices.push_back(Vec3d(0, 0, i == 0 ? radius : -radius));
      continue;
    }
    for (int j = 0; j < segments; ++j) {
      const double phi = kTwoPi * j / segments;
      ring_index[i].push_back(static_cast<std::uint32_t>(mesh.vertices.size()));
      mesh.vertices.push_back(radius *
                              Vec3d(std::sin(theta) * std::cos(phi),
                                    std::sin(theta) * std::sin(phi),
                                    std::cos(theta)));
    }
  }
  auto at = [&](int ring, int seg) {
    const auto& row = ring_index[ring];
    return row.size() == 1 ? row[0] : row[seg % segments];
  };
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      const std::uint32_t a = at(i, j), b = at(i, j + 1);
      const std::uint32_t c = at(i + 1, j), d = at(i + 1, j + 1);
      if (i == 0) {
        mesh.triangles.push_back({a, d, c});
      } else if (i + 2 == rings) {
        mesh.triangles.push_back({a, b, c});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({a, d, c});
      }
    }
  }
  mesh.recompute_bounds();
  return mesh;
}

// Independent point-triangle distance for the brute-force oracle.
double point_triangle_distance_ref(const Vec3d& p, const Vec3d& a,
                                   const Vec3d& b, const Vec3d& c) {
  const Vec3d n = (b - a).cross(c - a);
  const double nn = n.squaredNorm();
  if (nn > 0.0) {
    const Vec3d q = p - n * (n.dot(p - a) / nn);
    const double area2 = std::sqrt(nn);
    const double u = (b - q).cross(c - q).norm() / area2;
    const double v = (c - q).cross(a - q).norm() / area2;
    const double w = (a - q).cross(b - q).norm() / area2;
    if (std::abs(u + v + w - 1.0) < 1e-9) return (p - q).norm();
  }
  auto segment = [&](const Vec3d& s0, const Vec3d& s1) {
    const Vec3d d = s1 - s0;
    const double len2 = d.squaredNorm();
    const double t =
        len2 > 0.0 ? std::clamp(d.dot(p - s0) / len2, 0.0, 1.0) : 0.0;
    return (p - (s0 + t * d)).norm();
  };
  return std::min({segment(a, b), segment(b, c), segment(c, a)});
}

double brute_force_distance(const Vec3d& p, const TriangleMesh& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    best = std::min(best, point_triangle_distance_ref(
                              p, mesh.vertex(static_cast<std::uint32_t>(t), 0),
                              mesh.vertex(static_cast<std::uint32_t>(t), 1),
                              mesh.vertex(static_cast<std::uint32_t>(t), 2)));
  }
  return best;
}

// A perimeter print reaching `height`, one layer per 0.2 mm, with one
// scan word at the top.
gcode::Program print_program(double height, int positions) {
  std::string text = "G28\nG92 E0\nM104 S210\nM140 S60\n";
  double e = 0.0;
  char buf[128];
  for (double z = 0.2; z <= height + 1e-9; z += 0.2) {
    std::snprintf(buf, sizeof buf, "G1 Z%.3f F3000\n", z);
    text += buf;
    e += 1.0;
    std::snprintf(buf, sizeof buf, "G1 X160 Y160 E%.3f F1800\n", e);
    text += buf;
  }
  text += "M102 P" + std::to_string(positions) + "\n";
  return gcode::parse_program(text);
}

coupling::CouplingGeometry off_radial(double degrees) {
  coupling::CouplingGeometry g = coupling::CouplingGeometry::canonical();
  const Eigen::AngleAxisd rot(degrees * kPi / 180.0, Vec3d::UnitZ());
  g.vee_axes[0] = (rot * g.vee_axes[0]).normalized();
  return g;
}

// ---------------------------------------------------------------------
// criteria

// 1. M102 P20 semantics: 40 captures from 20 equally spaced positions.
Checker criterion_m102_semantics() {
  Checker c;
  const auto start = std::chrono::steady_clock::now();

  SimConfig config = SimConfig::defaults();
  config.scan.stride = 16;
  const TriangleMesh cube = place_on_bed(
      load_stl(fixture("cube_unit_ascii.stl")), config.machine.bed_center());
  c.require(cube.triangle_count() == 12, "fixture cube must have 12 facets");
  const Bvh tree(cube);

  const sim::RunResult result =
      sim::run_program(print_program(1.0, 20), config, tree, tree);
  c.require(result.scans.size() == 1, "exactly one scan expected");
  if (!result.scans.empty()) {
    const scan::ScanRecord& record = result.scans[0].record;
    c.require(record.captures.size() == 40,
              "2 cameras x 20 positions must record 40 captures, got " +
                  std::to_string(record.captures.size()));
    for (int k = 0; k < 20; ++k) {
      const double expected = kTwoPi * k / 20.0;
      c.require(record.captures[2 * k].bed_angle == expected &&
                    record.captures[2 * k + 1].bed_angle == expected,
                "capture angles must be 2*pi*k/20");
      c.require(record.captures[2 * k].camera == CameraName::Lower &&
                    record.captures[2 * k + 1].camera == CameraName::Upper,
                "both cameras must fire at each position");
    }
  }
  const double elapsed = seconds_since(start);
  c.require(elapsed < 1.0,
            "runtime " + std::to_string(elapsed) + " s exceeds 1 s");
  return c;
}

// 2. Thermal centre invariance and its off-radial breakage.
Checker criterion_thermal_invariance() {
  Checker c;
  const auto start = std::chrono::steady_clock::now();

  const coupling::CouplingGeometry radial =
      coupling::CouplingGeometry::canonical();
  for (int i = 0; i < 100; ++i) {
    const double dT = 200.0 * i / 99.0;
    const coupling::ThermalGrowth tg =
        coupling::thermal_growth(radial, dT, 23.6e-6);
    c.require(tg.center_displacement < 1e-9,
              "centre displacement reached " +
                  std::to_string(tg.center_displacement) + " mm at dT " +
                  std::to_string(dT));
    c.require(tg.out_of_plane_warp < 1e-9, "warp exceeded 1e-9 mm");
  }
  const coupling::ThermalGrowth broken =
      coupling::thermal_growth(off_radial(10.0), 180.0, 23.6e-6);
  c.require(broken.center_displacement > 1e-3,
            "10 degree off-radial vee must displace the centre by more "
            "than 1e-3 mm, got " +
                std::to_string(broken.center_displacement));

  const double elapsed = seconds_since(start);
  c.require(elapsed < 1.0,
            "runtime " + std::to_string(elapsed) + " s exceeds 1 s");
  return c;
}

// 3. Exact constraint: rank 6 canonical; rank 5 with parallel vees and
//    the free direction along the shared axis.
Checker criterion_exact_constraint() {
  Checker c;
  const coupling::ConstraintAnalysis canonical = coupling::analyze_constraints(
      coupling::contact_points(coupling::CouplingGeometry::canonical()));
  c.require(canonical.rank == 6, "canonical rank must be 6, got " +
                                     std::to_string(canonical.rank));

  coupling::CouplingGeometry parallel =
      coupling::CouplingGeometry::canonical();
  for (auto& axis : parallel.vee_axes) axis = Vec3d::UnitX();
  const coupling::ConstraintAnalysis analysis =
      coupling::analyze_constraints(coupling::contact_points(parallel));
  c.require(analysis.rank == 5, "parallel-vee rank must be 5, got " +
                                    std::to_string(analysis.rank));
  if (analysis.free_twists.cols() == 1) {
    const Vec3d v = analysis.free_twists.col(0).head<3>();
    c.require(std::abs(v.normalized().dot(Vec3d::UnitX())) > 0.999,
              "free twist must translate along the shared vee axis");
  } else {
    c.require(false, "expected exactly one free twist");
  }
  return c;
}

// 4. Reseat determinism of the idealized coupling.
Checker criterion_reseat_determinism() {
  Checker c;
  const coupling::ReseatReport report = coupling::reseat_repeatability(
      coupling::CouplingGeometry::canonical(), 1.0, 100, 20240131);
  c.require(report.max_translation_deviation < 1e-6,
            "translation deviation " +
                std::to_string(report.max_translation_deviation) +
                " mm exceeds 1e-6");
  c.require(report.max_rotation_deviation < 1e-9,
            "rotation deviation exceeds 1e-9 rad");
  return c;
}

// 5. Scan cycle restores the machine state and follows the canonical
//    phase table.
Checker criterion_scan_restoration() {
  Checker c;
  const scan::CaptureFn stub = [](CameraName, const RigidTransform&, double) {
    return std::vector<Vec3d>{};
  };
  for (int positions : {1, 2, 7, 20}) {
    MachineState state;
    state.position = Vec3d(77.7, 141.1, 33.4);
    state.hotend_temp = 212.0;
    state.bed_temp = 61.0;
    state.current_layer = 167;
    const MachineState before = state;
    const scan::ScanRecord record = scan::execute_scan(
        state, positions, MachineConfig::defaults(),
        coupling::CouplingGeometry::canonical(), stub);
    c.require(state == before, "state must be restored exactly for P = " +
                                   std::to_string(positions));
    c.require(record.phase_trace == scan::canonical_phase_sequence(positions),
              "phase trace must match the canonical table for P = " +
                  std::to_string(positions));
    c.require(record.net_rotation_units() == 0,
              "net rotation must be exactly zero");
  }

  // The published transition table for P = 2.
  using K = scan::ScanPhase::Kind;
  const std::vector<scan::ScanPhase> table{
      {K::Printing},
      {K::LoweringZ},
      {K::Disengaged},
      {K::Rotating, 0},
      {K::Capturing, 0, CameraName::Lower},
      {K::Capturing, 0, CameraName::Upper},
      {K::Rotating, 1},
      {K::Capturing, 1, CameraName::Lower},
      {K::Capturing, 1, CameraName::Upper},
      {K::Reversing},
      {K::Reengaging},
      {K::RaisingZ},
      {K::Printing},
  };
  c.require(scan::canonical_phase_sequence(2) == table,
            "canonical sequence for P = 2 must match the table");
  return c;
}

// 6. End-to-end geometric fidelity, including a corner-defect flip.
Checker criterion_end_to_end() {
  Checker c;
  const auto start = std::chrono::steady_clock::now();

  SimConfig config = SimConfig::defaults();
  config.scan.stride = 8;
  const Vec2d bed = config.machine.bed_center();
  const TriangleMesh reference = place_on_bed(
      subdivided_cube(60.0, 20, Vec3d::Zero()), bed);
  c.require(reference.triangle_count() == 4800,
            "reference mesh must have 4800 facets");
  const Bvh reference_tree(reference);

  const gcode::Program program = print_program(30.0, 8);

  // Defect-free: the printed part is the reference itself.
  const sim::RunResult clean =
      sim::run_program(program, config, reference_tree, reference_tree);
  c.require(clean.scans.size() == 1, "one scan expected");
  if (!clean.scans.empty()) {
    const sim::ScanOutcome& outcome = clean.scans[0];
    c.require(outcome.record.captures.size() == 16, "16 captures expected");
    c.require(outcome.cloud.size() > 1000, "cloud unexpectedly sparse");
    c.require(outcome.report.max < 1e-6,
              "max deviation " + std::to_string(outcome.report.max) +
                  " mm must stay below 1e-6");
    c.require(outcome.fault.verdict == defect::Verdict::Nominal,
              "defect-free run must be nominal");
  }

  // 0.5 mm displacement of a bottom-corner region of the printed part.
  TriangleMesh printed = reference;
  const Vec3d corner(bed.x() - 30.0, bed.y() - 30.0, 0.0);
  const Vec3d body_center(bed.x(), bed.y(), 30.0);
  for (Vec3d& v : printed.vertices) {
    if ((v - corner).norm() < 30.0) {
      v += 0.5 * (v - body_center).normalized();
    }
  }
  printed.recompute_bounds();
  const Bvh printed_tree(printed);
  const sim::RunResult defective =
      sim::run_program(program, config, printed_tree, reference_tree);
  c.require(defective.scans.size() == 1, "one scan expected");
  if (!defective.scans.empty()) {
    c.require(defective.scans[0].fault.verdict != defect::Verdict::Nominal,
              "0.5 mm corner displacement must flip the verdict, p95 = " +
                  std::to_string(defective.scans[0].report.p95));
  }

  const double elapsed = seconds_since(start);
  c.require(elapsed < 30.0,
            "runtime " + std::to_string(elapsed) + " s exceeds 30 s");
  return c;
}

// 7. Accelerated distance queries equal the brute force.
Checker criterion_distance_oracle() {
  Checker c;
  const TriangleMesh sphere = uv_sphere(25.0, 27, 20);
  c.require(sphere.triangle_count() == 1000, "oracle mesh must have 1000 tris");
  const Bvh tree(sphere);
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3d p(u(rng), u(rng), u(rng));
    const double fast = defect::point_to_mesh_distance(p, tree);
    const double slow = brute_force_distance(p, sphere);
    worst = std::max(worst, std::abs(fast - slow));
  }
  c.require(worst <= 1e-9, "worst disagreement " + std::to_string(worst) +
                               " mm exceeds 1e-9");
  return c;
}

// 8. G-code round trip, injection counts, idempotence.
Checker criterion_gcode_round_trip() {
  Checker c;
  const std::string corpus = read_file(fixture("corpus_1k.gcode"));
  c.require(!corpus.empty(), "corpus fixture missing");
  const gcode::Program once = gcode::parse_program(corpus);
  const gcode::Program twice =
      gcode::parse_program(gcode::serialize_program(once));
  c.require(once.equivalent(twice), "parse/serialize round trip failed");

  const gcode::Program fixture_program =
      gcode::parse_program(read_file(fixture("print_30layer.gcode")));
  const int layers =
      gcode::layer_count(gcode::detect_layers(fixture_program));
  c.require(layers == 30, "fixture must have 30 layers, got " +
                              std::to_string(layers));
  for (int n : {1, 5, 10}) {
    const gcode::Program injected =
        gcode::inject_scan_words(fixture_program, {n, 20});
    const int inserted = static_cast<int>(injected.commands.size() -
                                          fixture_program.commands.size());
    c.require(inserted == layers / n,
              "N = " + std::to_string(n) + " must insert " +
                  std::to_string(layers / n) + " words, got " +
                  std::to_string(inserted));
    const gcode::Program again = gcode::inject_scan_words(injected, {n, 20});
    c.require(again.equivalent(injected), "injection must be idempotent");
  }
  return c;
}

// 9. CoreXY inverse property and leadscrew steps.
Checker criterion_corexy() {
  Checker c;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2d v(u(rng), u(rng));
    const Vec2d back = corexy::to_cartesian(corexy::to_motor(v));
    worst = std::max(worst, (back - v).cwiseAbs().maxCoeff());
  }
  c.require(worst <= 1e-12, "round-trip error " + std::to_string(worst) +
                                " mm exceeds 1e-12");
  c.require(z_to_steps(8.0, MachineConfig::defaults()) == 3200,
            "8 mm at 200 x 16 steps must give 3200");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Checker()> run;
  };
  const std::vector<Criterion> criteria{
      {"M102 semantics: P=20 yields 40 captures at 2*pi*k/20",
       criterion_m102_semantics},
      {"thermal centre invariance over [0, 200] K, off-radial breakage",
       criterion_thermal_invariance},
      {"exact constraint: rank 6 canonical, rank 5 parallel vees",
       criterion_exact_constraint},
      {"reseat determinism: 100 perturbed solves within 1e-6 mm / 1e-9 rad",
       criterion_reseat_determinism},
      {"scan cycle restores machine state for P in {1, 2, 7, 20}",
       criterion_scan_restoration},
      {"end-to-end fidelity: nominal self-scan, corner defect flips verdict",
       criterion_end_to_end},
      {"distance oracle: accelerated equals brute force within 1e-9",
       criterion_distance_oracle},
      {"g-code round trip, injection counts, idempotence",
       criterion_gcode_round_trip},
      {"corexy inverse within 1e-12, z steps 8 mm -> 3200",
       criterion_corexy},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker result;
    try {
      result = criteria[i].run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (result.ok) {
      std::printf("PASS  criterion %zu: %s\n", i + 1, criteria[i].name);
    } else {
      ++failures;
      std::printf("FAIL  criterion %zu: %s\n      %s\n", i + 1,
                  criteria[i].name, result.detail.c_str());
    }
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
