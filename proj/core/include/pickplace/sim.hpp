#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pickplace/calib.hpp"
#include "pickplace/cloud.hpp"
#include "pickplace/geom3.hpp"
#include "pickplace/handeye.hpp"

namespace pickplace {

enum class ShapeKind { Box, Cylinder, LShape };

std::string to_string(ShapeKind k);
ShapeKind shape_from_string(const std::string& s);

// Object-frame solids, centred on their bounding box.
//   box:      dimensions = {size_x, size_y, size_z}
//   cylinder: dimensions = {radius, height}, axis along z
//   lshape:   dimensions = {leg_x, leg_y, thickness, height}; the two legs
//             run along +x and +y from the shared corner, extruded along z
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Box;
  std::vector<double> dimensions;
  double sample_density = 2.0e5;  // points per m^2

  void validate() const;  // throws InvalidSpec
  Vec3 half_extents() const;
};

/// Seeded surface sampling with outward unit normals, frame "object".
PointCloud synth_cloud(const ShapeSpec& spec, std::uint64_t seed);

enum class Visibility { Full, CameraFacing };

struct ViewSpec {
  Pose object_pose;  // robot_base -> object
  Pose camera_pose;  // robot_base -> camera
  double noise_sigma = 0.0;
  Visibility visibility = Visibility::CameraFacing;
  std::uint64_t seed = 0;
};

/// Places the cloud, culls back faces (n . (cam - p) > 0 survives), adds
/// isotropic Gaussian noise. Output frame robot_base. Throws EmptyAfterCulling.
PointCloud simulate_view(const PointCloud& cloud, const ViewSpec& view);

/// Camera pose at `eye` looking at `target`; image y points roughly along -up.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

/// Proper rotations (object frame) mapping the solid onto itself. Continuous
/// symmetries are sampled every `step` radians.
std::vector<Quat> shape_symmetries(const ShapeSpec& spec, double step = deg2rad(0.5));

/// Smallest pose error between `estimate` and truth * S * object_frame_pose over symmetries S.
PoseError symmetric_pose_error(const ShapeSpec& spec, const Pose& truth_object_pose,
                               const Pose& object_frame_pose, const Pose& estimate);

// Stable resting orientations: each rotates one face's outward normal to +z.
struct RestingPose {
  std::string name;
  Quat orientation;  // object -> base rotation when lying on the table
  double height = 0.0;  // centre height above the table
};

std::vector<RestingPose> resting_poses(const ShapeSpec& spec);

/// Top-down grasp in the object frame for an object lying in `rest`.
/// Gripper z points into the object; gripper x follows the long axis of the top face.
Pose default_grasp(const ShapeSpec& spec, const RestingPose& rest);

/// Projects board corners through a camera; noise is per-coordinate Gaussian.
PlanarView synth_planar_view(const CameraIntrinsics& k, const BoardSpec& board, const Pose& board_to_camera,
                             double pixel_noise, std::uint64_t seed);

/// Board poses facing the camera with diverse tilts, `distance` meters away.
std::vector<Pose> synth_board_poses(const BoardSpec& board, int count, double distance, std::uint64_t seed);

/// Perturbs a pose by a rotation-vector with N(0, rot_sigma) components and a
/// translation with N(0, trans_sigma) components.
Pose perturb_pose(const Pose& p, double rot_sigma, double trans_sigma, std::uint64_t seed);

struct HandEyeScene {
  Pose base_to_camera;
  Pose ee_to_marker;
};

/// Noise-free stations whose marker faces the camera with diverse tilts.
std::vector<StationSample> synth_stations(const HandEyeScene& scene, int count, std::uint64_t seed);

}  // namespace pickplace
