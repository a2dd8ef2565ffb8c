#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "bedscan/mesh.hpp"
#include "bedscan/types.hpp"

namespace bedscan {

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = 0;
  Vec3d point = Vec3d::Zero();

  bool valid() const { return std::isfinite(t); }
};

// Exact closest point on a triangle (face, edge, or vertex region).
Vec3d closest_point_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b,
                                const Vec3d& c);

// Moller-Trumbore. Returns hit distance along the unit `dir`, or +inf.
double ray_triangle(const Vec3d& origin, const Vec3d& dir, const Vec3d& a,
                    const Vec3d& b, const Vec3d& c);

// Binary AABB tree over mesh triangles; median split on the longest
// axis. The mesh must outlive the tree.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  // Nearest intersection of the ray with the mesh.
  RayHit raycast(const Vec3d& origin, const Vec3d& dir) const;

  // Exact minimum distance from p to the mesh surface.
  double distance(const Vec3d& p) const;
  Vec3d closest_point(const Vec3d& p) const;

  const TriangleMesh& mesh() const { return *mesh_; }

 private:
  struct Node {
    Aabb bounds;
    std::uint32_t first = 0;  // child index, or first triangle if leaf
    std::uint32_t count = 0;  // triangle count; 0 for interior nodes
  };

  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end);

  const TriangleMesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;  // triangle indices, leaf-contiguous
  std::vector<Vec3d> centroids_;
};

}  // namespace bedscan
