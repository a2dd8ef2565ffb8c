#pragma once

#include <string>

#include "bedscan/types.hpp"

namespace bedscan {

// Pinhole intrinsics. The sensor is width x height pixels of
// pixel_pitch millimetres; focal_length is in millimetres.
struct Intrinsics {
  int width = 1920;
  int height = 1080;
  double pixel_pitch = 0.0033;
  double focal_length = 4.0;

  bool valid() const {
    return width > 0 && height > 0 && pixel_pitch > 0.0 && focal_length > 0.0;
  }
};

enum class CameraName { Upper, Lower };

inline const char* to_string(CameraName n) {
  return n == CameraName::Upper ? "upper" : "lower";
}

// A fixed camera in the machine (chassis) frame. Camera convention:
// +Z optical axis, +X image right, +Y image down.
struct CameraMount {
  CameraName name = CameraName::Upper;
  RigidTransform pose_world = RigidTransform::Identity();
  Intrinsics intrinsics;
};

// Orientation with the optical axis through `target`, image x kept
// horizontal in the world.
RigidTransform look_at(const Vec3d& eye, const Vec3d& target);

}  // namespace bedscan
