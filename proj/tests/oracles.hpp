#pragma once

// Independent reference implementations used only by tests.

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "pickplace/cloud.hpp"
#include "pickplace/geom3.hpp"
#include "pickplace/kdtree.hpp"
#include "pickplace/rng.hpp"

namespace oracle {

using pickplace::Vec3;

// Linear scan; first strictly smaller distance wins so ties keep the lowest index.
inline pickplace::Neighbor nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  pickplace::Neighbor best{0, std::numeric_limits<double>::infinity()};
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - q).squaredNorm();
    if (d < best_sq) {
      best_sq = d;
      best.index = i;
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

// Voxel binning with a map of plain integer cells and running sums.
inline std::map<std::tuple<long, long, long>, std::pair<Vec3, int>> voxel_bins(const std::vector<Vec3>& pts,
                                                                               double voxel) {
  std::map<std::tuple<long, long, long>, std::pair<Vec3, int>> bins;
  for (const Vec3& p : pts) {
    const auto key = std::make_tuple(static_cast<long>(std::floor(p.x() / voxel)),
                                     static_cast<long>(std::floor(p.y() / voxel)),
                                     static_cast<long>(std::floor(p.z() / voxel)));
    auto& b = bins[key];
    if (b.second == 0) b.first = Vec3::Zero();
    b.first += p;
    b.second += 1;
  }
  return bins;
}

// Rotation matrix from Euler-free axis-angle, written out longhand.
inline pickplace::Mat3 axis_angle_matrix(const Vec3& axis, double angle) {
  const Vec3 k = axis.normalized();
  const double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
  pickplace::Mat3 r;
  r << k.x() * k.x() * v + c, k.x() * k.y() * v - k.z() * s, k.x() * k.z() * v + k.y() * s,
      k.y() * k.x() * v + k.z() * s, k.y() * k.y() * v + c, k.y() * k.z() * v - k.x() * s,
      k.z() * k.x() * v - k.y() * s, k.z() * k.y() * v + k.x() * s, k.z() * k.z() * v + c;
  return r;
}

inline pickplace::Pose random_pose(pickplace::Rng& rng, double max_trans = 1.0) {
  return pickplace::Pose(rng.rotation(), Vec3(rng.uniform(-max_trans, max_trans), rng.uniform(-max_trans, max_trans),
                                              rng.uniform(-max_trans, max_trans)));
}

inline std::vector<Vec3> random_points(pickplace::Rng& rng, std::size_t n, double half = 1.0) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half));
  }
  return out;
}

// Per-test scratch directory, wiped on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pickplace_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
