#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "pickplace/geom3.hpp"

namespace pickplace {

// Ordered 3D points in meters with optional unit normals.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or one unit normal per point
  FrameId frame = FrameId::robot_base();

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }

  /// Throws InvalidArgument if a normal count/unit-length or finiteness invariant is broken.
  void validate() const;
};

/// Applies `pose` to points and normals; the result is tagged with `frame`.
PointCloud transformed(const PointCloud& cloud, const Pose& pose, const FrameId& frame);
PointCloud transformed(const PointCloud& cloud, const Pose& pose);

Vec3 centroid(const PointCloud& cloud);

struct Aabb {
  Vec3 min = Vec3::Constant(-std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(std::numeric_limits<double>::infinity());

  static Aabb infinite() { return {}; }
  bool contains(const Vec3& p) const;
};

/// Points inside the closed box, in original order; normals filtered alongside.
PointCloud crop_aabb(const PointCloud& cloud, const Aabb& box);

/// One centroid per occupied voxel, ordered by voxel index. Throws NonPositiveVoxel.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

/// k-NN PCA normals oriented so that (viewpoint - p) . n >= 0. Throws TooFewPoints.
PointCloud estimate_normals(const PointCloud& cloud, std::size_t k, const Vec3& viewpoint);

struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();  // unit length
  double d = 0.0;               // normal . p = d, d >= 0
  double rms = 0.0;             // orthogonal residual
};

/// Total least squares plane. Throws DegenerateGeometry for collinear input.
PlaneFit fit_plane(const PointCloud& cloud);

}  // namespace pickplace
