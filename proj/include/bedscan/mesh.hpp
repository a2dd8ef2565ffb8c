#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bedscan/errors.hpp"
#include "bedscan/types.hpp"

namespace bedscan {

struct TriangleMesh {
  std::vector<Vec3d> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  Aabb bounds;

  std::size_t triangle_count() const { return triangles.size(); }

  Vec3d vertex(std::uint32_t tri, int corner) const {
    return vertices[triangles[tri][corner]];
  }

  void recompute_bounds();
};

// Reads ASCII or binary STL (auto-detected). Vertices are deduplicated
// within 1e-6 mm and zero-area facets dropped. Throws FormatError with a
// byte offset for truncated or malformed files.
TriangleMesh load_stl(const std::filesystem::path& file);
TriangleMesh parse_stl(const std::string& bytes);

// Writers used by tests and fixture generation.
void write_stl_ascii(const std::filesystem::path& file,
                     const TriangleMesh& mesh);
void write_stl_binary(const std::filesystem::path& file,
                      const TriangleMesh& mesh);

// Rigidly place a mesh: XY bounding-box centre moved to `center_xy`,
// minimum z moved to 0 (resting on the bed).
TriangleMesh place_on_bed(const TriangleMesh& mesh, const Vec2d& center_xy);

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& t);

}  // namespace bedscan
