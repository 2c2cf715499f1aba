#pragma once

#include <array>
#include <vector>

#include "pickplace/calib.hpp"
#include "pickplace/geom3.hpp"

namespace pickplace {

// Eye-to-hand setup: the camera is fixed and observes a marker rigidly
// attached to the end effector. For every station i
//
//   base_to_ee[i] * ee_to_marker == base_to_camera * cam_to_marker[i]
//
// Eliminating the constant ee_to_marker between stations i and j gives
//
//   A X = X B,  A = base_to_ee[j] * base_to_ee[i]^-1,
//               B = cam_to_marker[j] * cam_to_marker[i]^-1,  X = base_to_camera.
struct StationSample {
  Pose base_to_ee;     // robot kinematics
  Pose cam_to_marker;  // marker observation
};

struct MotionPair {
  Pose a;  // robot motion, base frame
  Pose b;  // marker motion, camera frame
};

struct HandEyeResult {
  Pose base_to_camera;
  Pose ee_to_marker;
  double rot_residual = 0.0;    // rms AX-XB rotation discrepancy, radians
  double trans_residual = 0.0;  // rms AX-XB translation gap, meters
};

struct HandEyeOptions {
  bool all_pairs = false;            // every (i, j) with i < j instead of consecutive stations
  double min_axis_angle = 1e-3;      // radians between motion axes
  double min_motion_angle = 1e-3;    // each motion's rotation must lie in (min, pi - min)
  bool refine = false;               // polish the linear solution by joint least squares on all stations
};

/// Consecutive (i, i+1) pairs, or all pairs. Throws TooFewSamples for fewer than 3 samples.
std::vector<MotionPair> relative_motions(const std::vector<StationSample>& samples, bool all_pairs = false);

struct AxXbSolution {
  Pose x;
  double rot_residual = 0.0;
  double trans_residual = 0.0;
};

/// Tsai-Lenz: rotation from the modified Rodrigues relation, then translation
/// by stacked least squares. Throws TooFewPairs or DegenerateMotions.
AxXbSolution solve_ax_xb(const std::vector<MotionPair>& pairs, const HandEyeOptions& options = {});

/// rms rotation angle and translation gap of A X versus X B over all pairs.
std::pair<double, double> ax_xb_residuals(const std::vector<MotionPair>& pairs, const Pose& x);

HandEyeResult calibrate_eye_to_hand(const std::vector<StationSample>& samples, const HandEyeOptions& options = {});

// Square marker centred on its frame origin, z out of the marker plane.
// Corners run counter-clockwise from top-left (-s/2, +s/2) when viewed from +z.
struct MarkerSpec {
  double side_length = 0.1;

  std::array<Vec3, 4> corners() const;
};

struct MarkerPose {
  Pose cam_to_marker;
  double rms_px = 0.0;
};

/// Planar PnP for the 4 marker corners. Throws DegenerateConfiguration.
MarkerPose marker_pnp(const CameraIntrinsics& k, const MarkerSpec& spec, const std::array<Vec2, 4>& corners_px);

}  // namespace pickplace
