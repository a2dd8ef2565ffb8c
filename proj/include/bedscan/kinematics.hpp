#pragma once

#include <cstdint>

#include "bedscan/camera.hpp"
#include "bedscan/errors.hpp"
#include "bedscan/types.hpp"

namespace bedscan {

// Static machine constants. Defaults describe the reference platform:
// 300 x 300 x 265 mm build volume on a 330 mm square bed with a
// 300 mm square heated region, an 8 mm pitch Z leadscrew, and a
// 120 mm OD bed-rotation bearing.
struct MachineConfig {
  Vec3d build_volume{300.0, 300.0, 265.0};
  Vec2d bed_size{330.0, 330.0};
  Vec2d heated_region{300.0, 300.0};
  double z_pitch = 8.0;          // mm per leadscrew revolution
  int steps_per_rev = 200;
  int microsteps = 16;
  double bed_rotation_gear_ratio = 5.18;
  double bearing_od = 120.0;
  double scan_bed_height = 60.0;  // chassis height of the bed top when
                                  // disengaged and resting on the pillars
  CameraMount upper_camera;
  CameraMount lower_camera;

  Vec2d bed_center() const {
    return {0.5 * build_volume.x(), 0.5 * build_volume.y()};
  }

  // Throws ConfigError if dimensions are non-positive or the heated
  // region exceeds the bed.
  void validate() const;

  static MachineConfig defaults();
};

enum class MachinePhase { Printing, Scanning };

struct MachineState {
  Vec3d position{0.0, 0.0, 0.0};
  double bed_angle = 0.0;
  double hotend_temp = 0.0;
  double bed_temp = 0.0;
  MachinePhase phase = MachinePhase::Printing;
  int current_layer = 0;

  bool operator==(const MachineState&) const = default;
};

namespace corexy {

// Belt convention: a = x + y, b = x - y.
template <typename Derived>
Vec2<typename Derived::Scalar> to_motor(const Eigen::MatrixBase<Derived>& xy) {
  return {xy.x() + xy.y(), xy.x() - xy.y()};
}

template <typename Derived>
Vec2<typename Derived::Scalar> to_cartesian(
    const Eigen::MatrixBase<Derived>& ab) {
  using S = typename Derived::Scalar;
  return {S(0.5) * (ab.x() + ab.y()), S(0.5) * (ab.x() - ab.y())};
}

}  // namespace corexy

// Leadscrew microstep count for an absolute Z height. Quantization
// error is at most half a step. Throws LimitError outside [0, z_max].
std::int64_t z_to_steps(double z, const MachineConfig& cfg);

// Returns `target` unchanged when inside the build volume, otherwise
// throws LimitError naming every violated axis.
Vec3d clamp_move(const Vec3d& target, const MachineConfig& cfg);

}  // namespace bedscan
