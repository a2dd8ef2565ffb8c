#pragma once

#include <filesystem>
#include <string>

#include "bedscan/capture.hpp"

namespace bedscan::io {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// ASCII PLY, element vertex with float x/y/z properties.
std::string to_ply(const PointCloud& cloud);
void write_ply(const std::filesystem::path& file, const PointCloud& cloud);

// Plain "x y z" lines at full double precision.
std::string to_xyz(const PointCloud& cloud);
void write_xyz(const std::filesystem::path& file, const PointCloud& cloud);

// FNV-1a 64-bit content digest, hex encoded.
std::string digest_file(const std::filesystem::path& file);

}  // namespace bedscan::io
