#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bedscan/coupling.hpp"
#include "bedscan/defect.hpp"
#include "bedscan/kinematics.hpp"

namespace bedscan {

struct ScanSettings {
  double clip_tolerance = 0.2;  // one layer height: admit the top layer
  int stride = 8;               // pixel stride for depth capture
};

// Chassis-frame placement of one camera; the mount pose is built from
// these with the optical axis through `target`.
struct CameraPlacement {
  Vec3d position{30.0, 30.0, 330.0};
  Vec3d target{150.0, 150.0, 90.0};
};

struct DefectSettings {
  defect::FaultRules rules;
  double inlier_tolerance = 0.3;  // mm, inlier cutoff for reports
};

// Whole-toolkit configuration: machine constants, coupling geometry,
// scan and fault-rule settings. Loads from a flat `key = value` file
// ('#' comments); every default embodies the reference platform.
struct SimConfig {
  MachineConfig machine;
  coupling::CouplingGeometry coupling;
  ScanSettings scan;
  DefectSettings defect;
  CameraPlacement upper_camera{{30.0, 30.0, 330.0}, {150.0, 150.0, 90.0}};
  CameraPlacement lower_camera{{30.0, 30.0, 130.0}, {150.0, 150.0, 80.0}};
  double cte = 23.6e-6;  // 1/K, wrought-aluminum class
  std::uint64_t seed = 12345;

  static SimConfig defaults();
  // Throws ConfigError for unknown keys, malformed values, or
  // invariant violations.
  static SimConfig from_text(const std::string& text);
  static SimConfig load(const std::filesystem::path& file);

  // Flat key/value snapshot of every setting, stable ordering.
  std::string to_key_values() const;
};

}  // namespace bedscan
