#include "pickplace/cloud.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "pickplace/error.hpp"
#include "pickplace/kdtree.hpp"

namespace pickplace {

void PointCloud::validate() const {
  if (!normals.empty() && normals.size() != points.size()) {
    throw Error(ErrorKind::InvalidArgument, "normal count " + std::to_string(normals.size()) +
                                                " does not match point count " + std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite point " + std::to_string(i));
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals[i].allFinite() || std::abs(normals[i].norm() - 1.0) > 1e-6) {
      throw Error(ErrorKind::InvalidArgument, "normal " + std::to_string(i) + " is not unit length");
    }
  }
}

PointCloud transformed(const PointCloud& cloud, const Pose& pose, const FrameId& frame) {
  PointCloud out{.points = {}, .normals = {}, .frame = frame};
  out.points.reserve(cloud.size());
  const Mat3 r = pose.rotation_matrix();
  for (const Vec3& p : cloud.points) out.points.push_back(r * p + pose.translation);
  out.normals.reserve(cloud.normals.size());
  for (const Vec3& n : cloud.normals) out.normals.push_back((r * n).normalized());
  return out;
}

PointCloud transformed(const PointCloud& cloud, const Pose& pose) { return transformed(cloud, pose, cloud.frame); }

Vec3 centroid(const PointCloud& cloud) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : cloud.points) sum += p;
  return cloud.empty() ? sum : Vec3(sum / static_cast<double>(cloud.size()));
}

bool Aabb::contains(const Vec3& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

PointCloud crop_aabb(const PointCloud& cloud, const Aabb& box) {
  PointCloud out{.points = {}, .normals = {}, .frame = cloud.frame};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!box.contains(cloud.points[i])) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
  }
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw Error(ErrorKind::NonPositiveVoxel, "voxel size must be positive");

  using Key = std::array<std::int64_t, 3>;
  std::map<Key, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Key key{static_cast<std::int64_t>(std::floor(p.x() / voxel)),
                  static_cast<std::int64_t>(std::floor(p.y() / voxel)),
                  static_cast<std::int64_t>(std::floor(p.z() / voxel))};
    cells[key].push_back(i);
  }

  auto lex = [](const Vec3& a, const Vec3& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  };

  PointCloud out{.points = {}, .normals = {}, .frame = cloud.frame};
  out.points.reserve(cells.size());
  for (auto& [key, members] : cells) {
    // Sum in coordinate order so the centroid does not depend on input order.
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (lex(cloud.points[a], cloud.points[b])) return true;
      if (lex(cloud.points[b], cloud.points[a])) return false;
      return cloud.has_normals() && lex(cloud.normals[a], cloud.normals[b]);
    });
    Vec3 sum = Vec3::Zero();
    for (std::size_t i : members) sum += cloud.points[i];
    out.points.push_back(sum / static_cast<double>(members.size()));
    if (cloud.has_normals()) {
      Vec3 nsum = Vec3::Zero();
      for (std::size_t i : members) nsum += cloud.normals[i];
      const double len = nsum.norm();
      out.normals.push_back(len > 1e-12 ? Vec3(nsum / len) : cloud.normals[members.front()]);
    }
  }
  return out;
}

namespace {

struct Moments {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
};

template <typename Range>
Moments moments_of(const std::vector<Vec3>& points, const Range& indices) {
  Moments m;
  std::size_t n = 0;
  for (std::size_t i : indices) {
    m.mean += points[i];
    ++n;
  }
  m.mean /= static_cast<double>(n);
  for (std::size_t i : indices) {
    const Vec3 d = points[i] - m.mean;
    m.cov += d * d.transpose();
  }
  m.cov /= static_cast<double>(n);
  return m;
}

}  // namespace

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k, const Vec3& viewpoint) {
  if (k < 3 || cloud.size() < k) {
    throw Error(ErrorKind::TooFewPoints, "normal estimation needs k >= 3 and at least k points");
  }
  const KdTree tree(cloud.points);
  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Vec3::UnitZ());
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = tree.knn(cloud.points[i], k);
    for (std::size_t j = 0; j < nbrs.size(); ++j) idx[j] = nbrs[j].index;
    const Moments m = moments_of(cloud.points, idx);
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(m.cov);
    Vec3 n = eig.eigenvectors().col(0).normalized();
    if ((viewpoint - cloud.points[i]).dot(n) < 0.0) n = -n;
    out.normals[i] = n;
  }
  return out;
}

PlaneFit fit_plane(const PointCloud& cloud) {
  if (cloud.size() < 3) throw Error(ErrorKind::DegenerateGeometry, "plane fit needs at least 3 points");
  std::vector<std::size_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Moments m = moments_of(cloud.points, all);
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(m.cov);
  // Eigenvalues ascending; the middle one is the variance across the best line.
  if (std::sqrt(std::max(eig.eigenvalues()[1], 0.0)) < 1e-9) {
    throw Error(ErrorKind::DegenerateGeometry, "points are collinear");
  }
  Vec3 n = eig.eigenvectors().col(0).normalized();
  double d = n.dot(m.mean);
  int major = 0;
  n.cwiseAbs().maxCoeff(&major);
  if (d < 0.0 || (d == 0.0 && n[major] < 0.0)) {
    n = -n;
    d = -d;
  }
  double sq = 0.0;
  for (const Vec3& p : cloud.points) {
    const double r = n.dot(p) - d;
    sq += r * r;
  }
  return {n, d, std::sqrt(sq / static_cast<double>(cloud.size()))};
}

}  // namespace pickplace
