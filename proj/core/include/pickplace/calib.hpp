#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pickplace/cloud.hpp"
#include "pickplace/geom3.hpp"

namespace pickplace {

// Pinhole camera with two radial distortion terms. Distortion is applied to
// normalized coordinates before the affine map:
//   x_d = x (1 + k1 r^2 + k2 r^4),  u = fx x_d + skew y_d + cx,  v = fy y_d + cy
struct CameraIntrinsics {
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  double skew = 0.0;
  double k1 = 0.0, k2 = 0.0;

  Mat3 matrix() const;
  void validate() const;  // throws InvalidArgument unless fx, fy > 0
};

/// Throws BehindCamera when cam_point.z <= 1e-9.
Vec2 project(const CameraIntrinsics& k, const Vec3& cam_point);

/// Removes radial distortion from a pixel, returning normalized coordinates (x/z, y/z).
Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& pixel);

/// Back-projects a pixel to the camera-frame point at depth z.
Vec3 unproject(const CameraIntrinsics& k, const Vec2& pixel, double depth);

struct PlanarView {
  std::vector<Vec3> object_points;  // board frame, z = 0, meters
  std::vector<Vec2> image_points;   // pixels
};

struct BoardSpec {
  int cols = 10;
  int rows = 7;
  double square_size_m = 0.03;

  /// Row-major inner-corner grid on the z = 0 plane.
  std::vector<Vec3> object_points() const;
};

// Maps board (x, y, 1) to homogeneous pixels; H(2,2) == 1 when it is nonzero.
struct Homography {
  Mat3 h = Mat3::Identity();

  Vec2 apply(const Vec2& xy) const;
};

/// Normalized DLT. Throws DegenerateConfiguration for fewer than 4 or collinear correspondences.
Homography estimate_homography(const PlanarView& view);

/// Closed-form intrinsics from >= 3 board homographies, assuming zero skew;
/// distortion is left at 0. Throws InsufficientViews or IllConditioned
/// (constraint condition number above 1e12).
CameraIntrinsics zhang_intrinsics(const std::vector<Homography>& homographies);

/// Board-to-camera pose (maps board coordinates into the camera frame).
Pose extrinsics_from_homography(const CameraIntrinsics& k, const Homography& h);

struct RefineOptions {
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-10;
};

struct RefineResult {
  CameraIntrinsics intrinsics;
  std::vector<Pose> poses;   // board -> camera, one per view
  double rms_px = 0.0;       // sqrt(mean squared residual component)
  double initial_rms_px = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt over {fx, fy, cx, cy, k1, k2} and every view pose.
/// Throws DivergedRefinement when 10 consecutive damping escalations fail.
RefineResult refine_reprojection(const std::vector<PlanarView>& views, const CameraIntrinsics& k0,
                                 const std::vector<Pose>& poses0, const RefineOptions& options = {});

/// Per-component reprojection rms, in pixels.
double reprojection_rms(const std::vector<PlanarView>& views, const CameraIntrinsics& k,
                        const std::vector<Pose>& poses);

struct CalibrationResult {
  CameraIntrinsics intrinsics;
  std::vector<Pose> poses;
  double rms_px = 0.0;
  double initial_rms_px = 0.0;
  int iterations = 0;
};

/// Homographies, closed form, per-view extrinsics, then joint refinement.
CalibrationResult calibrate_camera(const std::vector<PlanarView>& views);

struct StereoResult {
  Pose b_to_a;                   // maps camera-B coordinates into camera A
  double max_rot_disagreement = 0.0;    // radians, largest pairwise spread
  double max_trans_disagreement = 0.0;  // meters
};

/// Each pair holds (board->camA, board->camB). Throws EmptyInput.
StereoResult stereo_extrinsic(const std::vector<std::pair<Pose, Pose>>& pairs);

/// Eigenvector mean of unit quaternions (sign invariant).
Quat average_rotation(const std::vector<Quat>& rotations);

struct DepthDeviation {
  double mean = 0.0;  // signed, meters
  double rms = 0.0;
  double max = 0.0;   // largest absolute distance
};

/// Signed distances n . p - d of `measured` to the reference plane.
DepthDeviation depth_deviation(const PointCloud& measured, const Vec3& normal, double d);

}  // namespace pickplace
