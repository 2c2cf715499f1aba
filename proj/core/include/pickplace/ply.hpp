#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pickplace/cloud.hpp"

namespace pickplace {

enum class PlyEncoding { Ascii, BinaryLittleEndian };

// Coordinates are written as `property double` so save/load is lossless. The
// cloud frame travels in a `comment frame <name>` header line; files without
// one load as robot_base.
void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
              PlyEncoding encoding = PlyEncoding::Ascii);

/// Throws ParseError (message names the offending line) or IoError.
/// Properties other than x/y/z/nx/ny/nz are skipped and reported in `warnings`.
PointCloud load_ply(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

}  // namespace pickplace
