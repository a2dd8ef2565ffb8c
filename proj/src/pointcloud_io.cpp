#include "bedscan/pointcloud_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>

#include "bedscan/errors.hpp"

namespace bedscan::io {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_float(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw Error("cannot open for writing: " + file.string());
  }
  out << text;
}

}  // namespace

std::string to_ply(const PointCloud& cloud) {
  std::string out;
  out += "ply\nformat ascii 1.0\n";
  out += "element vertex " + std::to_string(cloud.points.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "end_header\n";
  for (const Vec3d& p : cloud.points) {
    out += format_float(static_cast<float>(p.x()));
    out += ' ';
    out += format_float(static_cast<float>(p.y()));
    out += ' ';
    out += format_float(static_cast<float>(p.z()));
    out += '\n';
  }
  return out;
}

void write_ply(const std::filesystem::path& file, const PointCloud& cloud) {
  write_text(file, to_ply(cloud));
}

std::string to_xyz(const PointCloud& cloud) {
  std::string out;
  for (const Vec3d& p : cloud.points) {
    out += format_double(p.x());
    out += ' ';
    out += format_double(p.y());
    out += ' ';
    out += format_double(p.z());
    out += '\n';
  }
  return out;
}

void write_xyz(const std::filesystem::path& file, const PointCloud& cloud) {
  write_text(file, to_xyz(cloud));
}

std::string digest_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error("cannot open for digest: " + file.string());
  }
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char hex[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[h & 0xf];
    h >>= 4;
  }
  hex[16] = '\0';
  return std::string("fnv1a64:") + hex;
}

}  // namespace bedscan::io
