#include "bedscan/capture.hpp"

#include <algorithm>

#include "bedscan/errors.hpp"

namespace bedscan {

void PointCloud::append(const std::vector<Vec3d>& pts,
                        const CaptureSource& src) {
  const std::uint32_t source_index = static_cast<std::uint32_t>(sources.size());
  sources.push_back(src);
  points.insert(points.end(), pts.begin(), pts.end());
  source_of.insert(source_of.end(), pts.size(), source_index);
}

std::vector<Vec3d> raycast_capture(const Bvh& bvh,
                                   const RigidTransform& camera_pose,
                                   const Intrinsics& intrinsics, int stride) {
  if (stride < 1) {
    throw ParameterError("pixel stride must be >= 1");
  }
  if (!intrinsics.valid()) {
    throw ParameterError("camera intrinsics must be positive");
  }
  std::vector<Vec3d> points;
  const Vec3d origin = camera_pose.translation();
  const Mat3d rot = camera_pose.linear();
  const double cx = 0.5 * (intrinsics.width - 1);
  const double cy = 0.5 * (intrinsics.height - 1);
  for (int v = 0; v < intrinsics.height; v += stride) {
    for (int u = 0; u < intrinsics.width; u += stride) {
      const Vec3d dir_camera((u - cx) * intrinsics.pixel_pitch,
                             (v - cy) * intrinsics.pixel_pitch,
                             intrinsics.focal_length);
      const Vec3d dir = (rot * dir_camera).normalized();
      const RayHit hit = bvh.raycast(origin, dir);
      if (hit.valid()) points.push_back(hit.point);
    }
  }
  return points;
}

std::vector<Vec3d> clip_to_height(const std::vector<Vec3d>& points,
                                  double z_max, double tolerance) {
  if (tolerance < 0.0) {
    throw ParameterError("clip tolerance must be non-negative");
  }
  std::vector<Vec3d> kept;
  kept.reserve(points.size());
  std::copy_if(points.begin(), points.end(), std::back_inserter(kept),
               [&](const Vec3d& p) { return p.z() <= z_max + tolerance; });
  return kept;
}

PointCloud merge_scan(const std::vector<CaptureRecord>& captures, int layer) {
  PointCloud cloud;
  for (const CaptureRecord& capture : captures) {
    cloud.append(capture.points, {layer, capture.bed_angle, capture.camera});
  }
  return cloud;
}

}  // namespace bedscan
