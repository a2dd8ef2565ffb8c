#include "bedscan/kinematics.hpp"

#include <cmath>
#include <string>

namespace bedscan {

RigidTransform look_at(const Vec3d& eye, const Vec3d& target) {
  const Vec3d forward = (target - eye).normalized();
  Vec3d right = forward.cross(Vec3d::UnitZ());
  if (right.norm() < 1e-12) {
    right = Vec3d::UnitX();  // looking straight up/down
  }
  right.normalize();
  const Vec3d down = forward.cross(right);
  Mat3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  RigidTransform t = RigidTransform::Identity();
  t.linear() = r;
  t.translation() = eye;
  return t;
}

void MachineConfig::validate() const {
  if ((build_volume.array() <= 0.0).any() || (bed_size.array() <= 0.0).any() ||
      (heated_region.array() <= 0.0).any() || z_pitch <= 0.0 ||
      steps_per_rev <= 0 || microsteps <= 0 || bearing_od <= 0.0) {
    throw ConfigError("machine dimensions must be strictly positive");
  }
  if ((heated_region.array() > bed_size.array()).any()) {
    throw ConfigError("heated region exceeds the bed size");
  }
  if (!upper_camera.intrinsics.valid() || !lower_camera.intrinsics.valid()) {
    throw ConfigError("camera intrinsics must be positive");
  }
}

MachineConfig MachineConfig::defaults() {
  MachineConfig cfg;
  cfg.upper_camera.name = CameraName::Upper;
  cfg.upper_camera.pose_world =
      look_at({30.0, 30.0, 330.0}, {150.0, 150.0, 90.0});
  cfg.lower_camera.name = CameraName::Lower;
  cfg.lower_camera.pose_world =
      look_at({30.0, 30.0, 130.0}, {150.0, 150.0, 80.0});
  return cfg;
}

std::int64_t z_to_steps(double z, const MachineConfig& cfg) {
  if (!(z >= 0.0) || z > cfg.build_volume.z()) {
    throw LimitError("Z target " + std::to_string(z) +
                     " outside [0, " + std::to_string(cfg.build_volume.z()) +
                     "] on axis Z");
  }
  const double steps_per_mm =
      static_cast<double>(cfg.steps_per_rev) * cfg.microsteps / cfg.z_pitch;
  return std::llround(z * steps_per_mm);
}

Vec3d clamp_move(const Vec3d& target, const MachineConfig& cfg) {
  std::string violated;
  const char* names[3] = {"X", "Y", "Z"};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(target[i]) || target[i] < 0.0 ||
        target[i] > cfg.build_volume[i]) {
      if (!violated.empty()) violated += ", ";
      violated += names[i];
    }
  }
  if (!violated.empty()) {
    throw LimitError("target outside build volume on axis " + violated);
  }
  return target;
}

}  // namespace bedscan
