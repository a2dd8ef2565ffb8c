#include "bedscan/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace bedscan {

namespace {

// Quantized coordinates; merges vertices within the dedup resolution.
struct VertexKey {
  std::int64_t x, y, z;
  bool operator==(const VertexKey&) const = default;
};

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

constexpr double kDedupResolution = 1e-6;  // mm

class MeshBuilder {
 public:
  void add_triangle(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    // Reject degenerates before touching the vertex pool so dropped
    // facets leave no orphan vertices (and no bound pollution).
    if ((b - a).cross(c - a).norm() < 1e-12) return;
    const VertexKey ka = key(a), kb = key(b), kc = key(c);
    if (ka == kb || kb == kc || ka == kc) return;  // below dedup resolution
    mesh_.triangles.push_back({add_vertex(ka, a), add_vertex(kb, b),
                               add_vertex(kc, c)});
  }

  TriangleMesh take() {
    mesh_.recompute_bounds();
    return std::move(mesh_);
  }

 private:
  static VertexKey key(const Vec3d& v) {
    return {quantize(v.x()), quantize(v.y()), quantize(v.z())};
  }

  static std::int64_t quantize(double v) {
    return static_cast<std::int64_t>(std::llround(v / kDedupResolution));
  }

  std::uint32_t add_vertex(const VertexKey& key, const Vec3d& v) {
    auto [it, inserted] = index_.try_emplace(
        key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(v);
    return it->second;
  }

  TriangleMesh mesh_;
  std::unordered_map<VertexKey, std::uint32_t, VertexKeyHash> index_;
};

float read_le_float(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

std::uint32_t read_le_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

TriangleMesh parse_binary_stl(const std::string& bytes) {
  if (bytes.size() < 84) {
    throw FormatError("truncated STL: missing binary header", bytes.size());
  }
  const std::uint32_t count = read_le_u32(bytes.data() + 80);
  const std::size_t expected = 84 + std::size_t{50} * count;
  if (bytes.size() != expected) {
    throw FormatError("binary STL facet count mismatch: header declares " +
                          std::to_string(count) + " facets, expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()),
                      80);
  }
  MeshBuilder builder;
  for (std::uint32_t f = 0; f < count; ++f) {
    const char* rec = bytes.data() + 84 + std::size_t{50} * f;
    Vec3d v[3];
    for (int i = 0; i < 3; ++i) {
      const char* p = rec + 12 + 12 * i;  // skip the facet normal
      v[i] = Vec3d(read_le_float(p), read_le_float(p + 4),
                   read_le_float(p + 8));
    }
    builder.add_triangle(v[0], v[1], v[2]);
  }
  return builder.take();
}

struct AsciiCursor {
  const std::string& text;
  std::size_t pos = 0;

  std::string_view next_token() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    return std::string_view(text).substr(start, pos - start);
  }

  void expect(std::string_view keyword) {
    const std::size_t at = pos;
    const std::string_view tok = next_token();
    if (tok != keyword) {
      throw FormatError("expected '" + std::string(keyword) + "', got '" +
                            std::string(tok) + "'",
                        at);
    }
  }

  double number() {
    const std::size_t at = pos;
    const std::string_view tok = next_token();
    double value = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw FormatError("malformed number '" + std::string(tok) + "'", at);
    }
    return value;
  }
};

TriangleMesh parse_ascii_stl(const std::string& text) {
  AsciiCursor cur{text};
  cur.expect("solid");
  // Optional name: consume the rest of the first line.
  while (cur.pos < text.size() && text[cur.pos] != '\n') ++cur.pos;

  MeshBuilder builder;
  for (;;) {
    const std::size_t at = cur.pos;
    const std::string_view tok = cur.next_token();
    if (tok == "endsolid") break;
    if (tok.empty()) {
      throw FormatError("unexpected end of ASCII STL", at);
    }
    if (tok != "facet") {
      throw FormatError("expected 'facet' or 'endsolid', got '" +
                            std::string(tok) + "'",
                        at);
    }
    cur.expect("normal");
    cur.number();
    cur.number();
    cur.number();
    cur.expect("outer");
    cur.expect("loop");
    Vec3d v[3];
    for (int i = 0; i < 3; ++i) {
      cur.expect("vertex");
      v[i] = Vec3d(cur.number(), cur.number(), cur.number());
    }
    cur.expect("endloop");
    cur.expect("endfacet");
    builder.add_triangle(v[0], v[1], v[2]);
  }
  return builder.take();
}

}  // namespace

void TriangleMesh::recompute_bounds() {
  bounds = Aabb{};
  for (const Vec3d& v : vertices) bounds.expand(v);
}

TriangleMesh parse_stl(const std::string& bytes) {
  // A binary file may begin with "solid"; trust a consistent binary
  // layout first, then fall back to text.
  if (bytes.size() >= 84) {
    const std::uint32_t count = read_le_u32(bytes.data() + 80);
    if (bytes.size() == 84 + std::size_t{50} * count &&
        bytes.rfind("solid", 0) != 0) {
      return parse_binary_stl(bytes);
    }
  }
  if (bytes.rfind("solid", 0) == 0 &&
      bytes.find("facet") != std::string::npos) {
    return parse_ascii_stl(bytes);
  }
  return parse_binary_stl(bytes);
}

TriangleMesh load_stl(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open STL file: " + file.string(), 0);
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return parse_stl(bytes);
}

void write_stl_ascii(const std::filesystem::path& file,
                     const TriangleMesh& mesh) {
  std::ofstream out(file);
  out << "solid mesh\n";
  for (const auto& tri : mesh.triangles) {
    const Vec3d a = mesh.vertices[tri[0]];
    const Vec3d b = mesh.vertices[tri[1]];
    const Vec3d c = mesh.vertices[tri[2]];
    Vec3d n = (b - a).cross(c - a);
    const double len = n.norm();
    if (len > 0.0) n /= len;
    out << "  facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n'
        << "    outer loop\n";
    for (const Vec3d& v : {a, b, c}) {
      out << "      vertex " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid mesh\n";
}

void write_stl_binary(const std::filesystem::path& file,
                      const TriangleMesh& mesh) {
  std::ofstream out(file, std::ios::binary);
  char header[80] = {};
  std::strncpy(header, "binary stl", sizeof header - 1);
  out.write(header, 80);
  const std::uint32_t count = static_cast<std::uint32_t>(mesh.triangles.size());
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& tri : mesh.triangles) {
    const Vec3d a = mesh.vertices[tri[0]];
    const Vec3d b = mesh.vertices[tri[1]];
    const Vec3d c = mesh.vertices[tri[2]];
    Vec3d n = (b - a).cross(c - a);
    const double len = n.norm();
    if (len > 0.0) n /= len;
    float rec[12] = {
        static_cast<float>(n.x()), static_cast<float>(n.y()),
        static_cast<float>(n.z()), static_cast<float>(a.x()),
        static_cast<float>(a.y()), static_cast<float>(a.z()),
        static_cast<float>(b.x()), static_cast<float>(b.y()),
        static_cast<float>(b.z()), static_cast<float>(c.x()),
        static_cast<float>(c.y()), static_cast<float>(c.z())};
    out.write(reinterpret_cast<const char*>(rec), 48);
    const char attr[2] = {};
    out.write(attr, 2);
  }
}

TriangleMesh place_on_bed(const TriangleMesh& mesh, const Vec2d& center_xy) {
  const Vec3d c = mesh.bounds.center();
  RigidTransform t = RigidTransform::Identity();
  t.translation() =
      Vec3d(center_xy.x() - c.x(), center_xy.y() - c.y(), -mesh.bounds.min.z());
  return transformed(mesh, t);
}

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& t) {
  TriangleMesh out = mesh;
  for (Vec3d& v : out.vertices) v = t * v;
  out.recompute_bounds();
  return out;
}

}  // namespace bedscan
