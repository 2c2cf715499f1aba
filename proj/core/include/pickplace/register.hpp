#pragma once

#include <span>
#include <vector>

#include "pickplace/cloud.hpp"
#include "pickplace/geom3.hpp"

namespace pickplace {

enum class IcpVariant { PointToPoint, PointToPlane };

struct IcpParams {
  int max_iterations = 60;
  double max_correspondence_dist = 0.02;  // meters
  double convergence_delta_rmse = 1e-6;   // meters
  IcpVariant variant = IcpVariant::PointToPoint;

  /// Throws InvalidArgument unless every field is positive.
  void validate() const;
};

struct AlignmentResult {
  Pose transform;            // maps the source (registered) cloud onto the target (scanned) cloud
  double fitness = 0.0;      // inlier fraction of the source
  double inlier_rmse = 0.0;  // meters
  int iterations = 0;
  bool converged = false;
  std::vector<double> rmse_history;  // inlier rmse at the initial pose and after each accepted iteration
};

/// Least-squares rigid transform (no scale) with dst ~ T(src). Reflections are
/// never returned. Throws LengthMismatch or DegenerateGeometry.
Pose umeyama_fit(std::span<const Vec3> src, std::span<const Vec3> dst);

/// Iterative closest point from `init`. Throws NoCorrespondences when no
/// source point lies within the gate at `init`, and MissingNormals for
/// point-to-plane without target normals.
///
/// An iteration is only accepted when the inlier rmse does not grow. A
/// rejected step is halved up to four times; point-to-plane then falls back
/// to a point-to-point step. If nothing is accepted the loop ends and keeps
/// the previous estimate.
AlignmentResult icp(const PointCloud& source, const PointCloud& target, const Pose& init, const IcpParams& params);

/// Centroid + principal-axis alignment. Emits 4 proper-rotation hypotheses
/// covering the axis sign ambiguities. Throws DegenerateGeometry.
std::vector<Pose> coarse_align_pca(const PointCloud& source, const PointCloud& target);

/// Multi-start ICP from every coarse hypothesis; highest fitness wins, then
/// lower rmse, then lower hypothesis index.
AlignmentResult align_object(const PointCloud& registered, const PointCloud& scanned, const IcpParams& params);

struct FitnessScore {
  double fitness = 0.0;
  double inlier_rmse = 0.0;  // 0 when there are no inliers
};

FitnessScore compute_fitness(const PointCloud& source, const PointCloud& target, const Pose& t, double gate);

}  // namespace pickplace
