#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bedscan/bvh.hpp"
#include "bedscan/camera.hpp"
#include "bedscan/mesh.hpp"
#include "bedscan/types.hpp"

namespace bedscan {

// Provenance of a run of captured points.
struct CaptureSource {
  int layer = 0;
  double bed_angle = 0.0;
  CameraName camera = CameraName::Lower;
};

// Bed-frame point cloud with per-point provenance.
struct PointCloud {
  std::vector<Vec3d> points;
  std::vector<std::uint32_t> source_of;  // index into sources, per point
  std::vector<CaptureSource> sources;

  std::size_t size() const { return points.size(); }

  void append(const std::vector<Vec3d>& pts, const CaptureSource& src);
};

// Pinhole depth capture: casts one ray per stride-th pixel from the
// camera pose (camera -> bed frame) and returns the bed-frame hit
// points. Misses contribute nothing; an empty result is valid.
std::vector<Vec3d> raycast_capture(const Bvh& bvh,
                                   const RigidTransform& camera_pose,
                                   const Intrinsics& intrinsics, int stride);

// Retains exactly the points with z <= z_max + tolerance.
std::vector<Vec3d> clip_to_height(const std::vector<Vec3d>& points,
                                  double z_max, double tolerance);

// One capture of a scan cycle: the bed angle, the camera that took it,
// its effective bed-frame pose, and the sampled points.
struct CaptureRecord {
  double bed_angle = 0.0;
  CameraName camera = CameraName::Lower;
  RigidTransform camera_pose = RigidTransform::Identity();
  std::vector<Vec3d> points;
};

// Concatenates per-capture points into one bed-frame cloud with
// provenance tags; no resampling.
PointCloud merge_scan(const std::vector<CaptureRecord>& captures, int layer);

}  // namespace bedscan
