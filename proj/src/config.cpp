#include "bedscan/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bedscan/pointcloud_io.hpp"

namespace bedscan {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

// Flat `key = value` file; '#' starts a comment; list values are
// whitespace separated.
class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty key");
      }
      entries_[key] = value;
    }
  }

  bool take_double(const std::string& key, double& out) {
    return take(key, [&](const std::string& v) { out = parse_double(key, v); });
  }

  bool take_int(const std::string& key, int& out) {
    return take(key, [&](const std::string& v) {
      const double d = parse_double(key, v);
      out = static_cast<int>(d);
      if (static_cast<double>(out) != d) {
        throw ConfigError("config key '" + key + "': expected an integer");
      }
    });
  }

  bool take_u64(const std::string& key, std::uint64_t& out) {
    return take(key, [&](const std::string& v) {
      const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
      if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key +
                          "': expected an unsigned integer");
      }
    });
  }

  bool take_vec3(const std::string& key, Vec3d& out) {
    return take(key, [&](const std::string& v) {
      const std::vector<double> parts = parse_list(key, v);
      if (parts.size() != 3) {
        throw ConfigError("config key '" + key + "': expected three values");
      }
      out = Vec3d(parts[0], parts[1], parts[2]);
    });
  }

  bool take_triple(const std::string& key, std::array<double, 3>& out) {
    Vec3d v;
    if (!take_vec3(key, v)) return false;
    out = {v.x(), v.y(), v.z()};
    return true;
  }

  void finish() const {
    if (entries_.empty()) return;
    std::string keys;
    for (const auto& [key, value] : entries_) {
      if (!keys.empty()) keys += ", ";
      keys += key;
    }
    throw ConfigError("unknown config keys: " + keys);
  }

 private:
  template <typename Fn>
  bool take(const std::string& key, Fn&& fn) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return false;
    fn(it->second);
    entries_.erase(it);
    return true;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
      throw ConfigError("config key '" + key + "': malformed number '" + v +
                        "'");
    }
    return out;
  }

  static std::vector<double> parse_list(const std::string& key,
                                        const std::string& v) {
    std::vector<double> out;
    std::istringstream stream(v);
    std::string token;
    while (stream >> token) out.push_back(parse_double(key, token));
    return out;
  }

  std::map<std::string, std::string> entries_;
};

constexpr double kDegree = kPi / 180.0;

}  // namespace

SimConfig SimConfig::defaults() {
  SimConfig cfg;
  cfg.machine = MachineConfig::defaults();
  cfg.coupling = coupling::CouplingGeometry::canonical();
  return cfg;
}

SimConfig SimConfig::from_text(const std::string& text) {
  SimConfig cfg = defaults();
  KeyValues kv(text);

  MachineConfig& m = cfg.machine;
  kv.take_double("machine.build_volume_x", m.build_volume.x());
  kv.take_double("machine.build_volume_y", m.build_volume.y());
  kv.take_double("machine.build_volume_z", m.build_volume.z());
  kv.take_double("machine.bed_size_x", m.bed_size.x());
  kv.take_double("machine.bed_size_y", m.bed_size.y());
  kv.take_double("machine.heated_region_x", m.heated_region.x());
  kv.take_double("machine.heated_region_y", m.heated_region.y());
  kv.take_double("machine.z_pitch", m.z_pitch);
  kv.take_int("machine.steps_per_rev", m.steps_per_rev);
  kv.take_int("machine.microsteps", m.microsteps);
  kv.take_double("machine.bed_rotation_gear_ratio", m.bed_rotation_gear_ratio);
  kv.take_double("machine.bearing_od", m.bearing_od);
  kv.take_double("machine.scan_bed_height", m.scan_bed_height);

  kv.take_vec3("camera.upper.position", cfg.upper_camera.position);
  kv.take_vec3("camera.upper.target", cfg.upper_camera.target);
  kv.take_vec3("camera.lower.position", cfg.lower_camera.position);
  kv.take_vec3("camera.lower.target", cfg.lower_camera.target);
  Intrinsics intrinsics;
  kv.take_int("camera.width", intrinsics.width);
  kv.take_int("camera.height", intrinsics.height);
  kv.take_double("camera.pixel_pitch", intrinsics.pixel_pitch);
  kv.take_double("camera.focal_length", intrinsics.focal_length);

  double circle_radius = 140.0;
  double vee_half_angle_deg = 45.0;
  double ball_radius = 6.0;
  Vec3d ball_angles_deg(90.0, 210.0, 330.0);
  const bool coupling_changed =
      kv.take_double("coupling.circle_radius", circle_radius) |
      kv.take_double("coupling.vee_half_angle_deg", vee_half_angle_deg) |
      kv.take_double("coupling.ball_radius", ball_radius) |
      kv.take_vec3("coupling.ball_angles_deg", ball_angles_deg);
  if (coupling_changed) {
    coupling::CouplingGeometry g;
    g.vee_half_angle = vee_half_angle_deg * kDegree;
    g.ball_radius = ball_radius;
    for (int i = 0; i < 3; ++i) {
      const double a = ball_angles_deg[i] * kDegree;
      g.ball_centers[i] =
          circle_radius * Vec3d(std::cos(a), std::sin(a), 0.0);
      g.vee_axes[i] = -g.ball_centers[i].normalized();
    }
    g.seating_tolerance = cfg.coupling.seating_tolerance;
    g.screw_heights = cfg.coupling.screw_heights;
    cfg.coupling = g;
  }
  for (int i = 0; i < 3; ++i) {
    Vec3d axis;
    if (kv.take_vec3("coupling.vee_axis_" + std::to_string(i + 1), axis)) {
      if (axis.norm() < 1e-12) {
        throw ConfigError("coupling.vee_axis_" + std::to_string(i + 1) +
                          " must be nonzero");
      }
      cfg.coupling.vee_axes[i] = axis.normalized();
    }
  }
  kv.take_triple("coupling.screw_heights", cfg.coupling.screw_heights);
  kv.take_double("coupling.seating_tolerance", cfg.coupling.seating_tolerance);
  kv.take_double("coupling.cte", cfg.cte);

  kv.take_double("scan.clip_tolerance", cfg.scan.clip_tolerance);
  kv.take_int("scan.stride", cfg.scan.stride);

  kv.take_double("defect.tolerable_p95", cfg.defect.rules.tolerable_p95);
  kv.take_double("defect.terminal_max", cfg.defect.rules.terminal_max);
  kv.take_double("defect.terminal_missing_fraction",
                 cfg.defect.rules.terminal_missing_fraction);
  kv.take_double("defect.inlier_tolerance", cfg.defect.inlier_tolerance);

  kv.take_u64("sim.seed", cfg.seed);
  kv.finish();

  cfg.machine.upper_camera = {CameraName::Upper,
                              look_at(cfg.upper_camera.position,
                                      cfg.upper_camera.target),
                              intrinsics};
  cfg.machine.lower_camera = {CameraName::Lower,
                              look_at(cfg.lower_camera.position,
                                      cfg.lower_camera.target),
                              intrinsics};

  cfg.machine.validate();
  cfg.coupling.validate();
  cfg.defect.rules.validate();
  if (cfg.scan.stride < 1) {
    throw ConfigError("scan.stride must be >= 1");
  }
  if (cfg.scan.clip_tolerance < 0.0) {
    throw ConfigError("scan.clip_tolerance must be non-negative");
  }
  return cfg;
}

SimConfig SimConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ConfigError("cannot open config file: " + file.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_text(text);
}

std::string SimConfig::to_key_values() const {
  using io::format_double;
  std::ostringstream out;
  auto emit = [&](const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto num = [&](const std::string& key, double v) {
    emit(key, format_double(v));
  };
  auto vec = [&](const std::string& key, const Vec3d& v) {
    emit(key, format_double(v.x()) + " " + format_double(v.y()) + " " +
                  format_double(v.z()));
  };

  num("machine.build_volume_x", machine.build_volume.x());
  num("machine.build_volume_y", machine.build_volume.y());
  num("machine.build_volume_z", machine.build_volume.z());
  num("machine.bed_size_x", machine.bed_size.x());
  num("machine.bed_size_y", machine.bed_size.y());
  num("machine.heated_region_x", machine.heated_region.x());
  num("machine.heated_region_y", machine.heated_region.y());
  num("machine.z_pitch", machine.z_pitch);
  emit("machine.steps_per_rev", std::to_string(machine.steps_per_rev));
  emit("machine.microsteps", std::to_string(machine.microsteps));
  num("machine.bed_rotation_gear_ratio", machine.bed_rotation_gear_ratio);
  num("machine.bearing_od", machine.bearing_od);
  num("machine.scan_bed_height", machine.scan_bed_height);
  vec("camera.upper.position", upper_camera.position);
  vec("camera.upper.target", upper_camera.target);
  vec("camera.lower.position", lower_camera.position);
  vec("camera.lower.target", lower_camera.target);
  emit("camera.width", std::to_string(machine.upper_camera.intrinsics.width));
  emit("camera.height",
       std::to_string(machine.upper_camera.intrinsics.height));
  num("camera.pixel_pitch", machine.upper_camera.intrinsics.pixel_pitch);
  num("camera.focal_length", machine.upper_camera.intrinsics.focal_length);
  for (int i = 0; i < 3; ++i) {
    vec("coupling.ball_center_" + std::to_string(i + 1),
        coupling.ball_centers[i]);
    vec("coupling.vee_axis_" + std::to_string(i + 1), coupling.vee_axes[i]);
  }
  num("coupling.vee_half_angle_deg", coupling.vee_half_angle / kDegree);
  num("coupling.ball_radius", coupling.ball_radius);
  emit("coupling.screw_heights", format_double(coupling.screw_heights[0]) +
                                     " " +
                                     format_double(coupling.screw_heights[1]) +
                                     " " +
                                     format_double(coupling.screw_heights[2]));
  num("coupling.seating_tolerance", coupling.seating_tolerance);
  num("coupling.cte", cte);
  num("scan.clip_tolerance", scan.clip_tolerance);
  emit("scan.stride", std::to_string(scan.stride));
  num("defect.tolerable_p95", defect.rules.tolerable_p95);
  num("defect.terminal_max", defect.rules.terminal_max);
  num("defect.terminal_missing_fraction",
      defect.rules.terminal_missing_fraction);
  num("defect.inlier_tolerance", defect.inlier_tolerance);
  emit("sim.seed", std::to_string(seed));
  return out.str();
}

}  // namespace bedscan
