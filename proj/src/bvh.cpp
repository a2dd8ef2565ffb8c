#include "bedscan/bvh.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace bedscan {

Vec3d closest_point_on_triangle(const Vec3d& p, const Vec3d& a, const Vec3d& b,
                                const Vec3d& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5.
  const Vec3d ab = b - a;
  const Vec3d ac = c - a;
  const Vec3d ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3d bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3d cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

double ray_triangle(const Vec3d& origin, const Vec3d& dir, const Vec3d& a,
                    const Vec3d& b, const Vec3d& c) {
  constexpr double kEps = 1e-12;
  const Vec3d e1 = b - a;
  const Vec3d e2 = c - a;
  const Vec3d pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < kEps) return std::numeric_limits<double>::infinity();
  const double inv_det = 1.0 / det;
  const Vec3d tvec = origin - a;
  const double u = tvec.dot(pvec) * inv_det;
  if (u < -kEps || u > 1.0 + kEps) {
    return std::numeric_limits<double>::infinity();
  }
  const Vec3d qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv_det;
  if (v < -kEps || u + v > 1.0 + kEps) {
    return std::numeric_limits<double>::infinity();
  }
  const double t = e2.dot(qvec) * inv_det;
  return t > kEps ? t : std::numeric_limits<double>::infinity();
}

namespace {

// Slab test against the box, bounded by the best hit so far.
bool ray_aabb(const Vec3d& origin, const Vec3d& inv_dir, const Aabb& box,
              double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int i = 0; i < 3; ++i) {
    double near = (box.min[i] - origin[i]) * inv_dir[i];
    double far = (box.max[i] - origin[i]) * inv_dir[i];
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1) return false;
  }
  return true;
}

constexpr std::uint32_t kLeafSize = 4;

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  const std::uint32_t n = static_cast<std::uint32_t>(mesh.triangle_count());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  centroids_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    centroids_[i] =
        (mesh.vertex(i, 0) + mesh.vertex(i, 1) + mesh.vertex(i, 2)) / 3.0;
  }
  if (n == 0) return;
  nodes_.reserve(2 * static_cast<std::size_t>(n));
  nodes_.emplace_back();
  build(0, 0, n);
  centroids_.clear();
  centroids_.shrink_to_fit();
}

void Bvh::build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
  Aabb bounds;
  Aabb centroid_bounds;
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t tri = order_[i];
    for (int c = 0; c < 3; ++c) bounds.expand(mesh_->vertex(tri, c));
    centroid_bounds.expand(centroids_[tri]);
  }
  nodes_[node].bounds = bounds;

  const std::uint32_t count = end - begin;
  const Vec3d extent = centroid_bounds.extent();
  int axis = 0;
  extent.maxCoeff(&axis);
  if (count <= kLeafSize || extent[axis] <= 0.0) {
    nodes_[node].first = begin;
    nodes_[node].count = count;
    return;
  }

  const std::uint32_t mid = begin + count / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t lhs, std::uint32_t rhs) {
                     return centroids_[lhs][axis] < centroids_[rhs][axis];
                   });

  const std::uint32_t left = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  nodes_.emplace_back();
  nodes_[node].first = left;
  nodes_[node].count = 0;
  build(left, begin, mid);
  build(left + 1, mid, end);
}

RayHit Bvh::raycast(const Vec3d& origin, const Vec3d& dir) const {
  RayHit hit;
  if (nodes_.empty()) return hit;

  const Vec3d inv_dir = dir.cwiseInverse();
  std::array<std::uint32_t, 64> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!ray_aabb(origin, inv_dir, node.bounds, hit.t)) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        const double t =
            ray_triangle(origin, dir, mesh_->vertex(tri, 0),
                         mesh_->vertex(tri, 1), mesh_->vertex(tri, 2));
        if (t < hit.t) {
          hit.t = t;
          hit.triangle = tri;
        }
      }
    } else {
      stack[top++] = node.first;
      stack[top++] = node.first + 1;
    }
  }
  if (hit.valid()) hit.point = origin + hit.t * dir;
  return hit;
}

Vec3d Bvh::closest_point(const Vec3d& p) const {
  Vec3d best_point = Vec3d::Zero();
  double best = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return best_point;

  std::array<std::uint32_t, 64> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.bounds.squared_distance(p) >= best) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        const Vec3d q =
            closest_point_on_triangle(p, mesh_->vertex(tri, 0),
                                      mesh_->vertex(tri, 1),
                                      mesh_->vertex(tri, 2));
        const double d2 = (q - p).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_point = q;
        }
      }
    } else {
      // Nearer child first so the far side prunes.
      const std::uint32_t a = node.first;
      const std::uint32_t b = node.first + 1;
      const double da = nodes_[a].bounds.squared_distance(p);
      const double db = nodes_[b].bounds.squared_distance(p);
      if (da < db) {
        stack[top++] = b;
        stack[top++] = a;
      } else {
        stack[top++] = a;
        stack[top++] = b;
      }
    }
  }
  return best_point;
}

double Bvh::distance(const Vec3d& p) const {
  if (nodes_.empty()) return std::numeric_limits<double>::infinity();
  return (closest_point(p) - p).norm();
}

}  // namespace bedscan
