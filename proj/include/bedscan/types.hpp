#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace bedscan {

inline constexpr double kPi = 3.141592653589793;
inline constexpr double kTwoPi = 2.0 * kPi;

// Dense types used throughout the library. Lengths are millimetres,
// angles radians, temperatures degrees Celsius unless stated otherwise.
template <typename T>
using Vec2 = Eigen::Matrix<T, 2, 1>;
template <typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Vec6 = Eigen::Matrix<T, 6, 1>;
template <typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T>
using Mat6 = Eigen::Matrix<T, 6, 6>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;
using Vec6d = Vec6<double>;
using Mat3d = Mat3<double>;
using Mat6d = Mat6<double>;

// Rigid transform (rotation + translation), det(R) = +1.
using RigidTransform = Eigen::Isometry3d;

struct Aabb {
  Vec3d min = Vec3d::Constant(std::numeric_limits<double>::infinity());
  Vec3d max = Vec3d::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void expand(const Vec3d& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  Vec3d extent() const { return max - min; }
  Vec3d center() const { return 0.5 * (min + max); }

  // Squared distance from p to the box (0 if inside).
  double squared_distance(const Vec3d& p) const {
    const Vec3d d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

// Rotation about the vertical axis through an arbitrary point in the XY plane.
inline RigidTransform rot_z_about(double angle, const Vec2d& center) {
  RigidTransform t = RigidTransform::Identity();
  t.translate(Vec3d(center.x(), center.y(), 0.0));
  t.rotate(Eigen::AngleAxisd(angle, Vec3d::UnitZ()));
  t.translate(Vec3d(-center.x(), -center.y(), 0.0));
  return t;
}

// Rotation angle of r, well conditioned near the identity (the acos of
// the trace loses half the digits there).
inline double rotation_angle(const Mat3d& r) {
  const Eigen::Quaterniond q(r);
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

}  // namespace bedscan
