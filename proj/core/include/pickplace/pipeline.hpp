#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pickplace/calib.hpp"
#include "pickplace/cloud.hpp"
#include "pickplace/graspdb.hpp"
#include "pickplace/json_io.hpp"
#include "pickplace/register.hpp"
#include "pickplace/sim.hpp"

namespace pickplace {

inline constexpr int kReportSchemaVersion = 1;

// Everything the simulated run needs. Poses are robot_base -> frame.
struct PipelineConfig {
  std::uint64_t seed = 1;

  CameraIntrinsics camera;  // ground truth used to render images
  Pose base_to_camera;      // ground-truth mounting

  int calib_views = 12;
  double calib_pixel_noise = 0.2;
  double calib_distance = 0.6;
  BoardSpec board;

  // Flat-target depth check: samples on the table plane z = 0 with a depth bias.
  int depth_points = 2000;
  double depth_noise = 0.001;
  double depth_bias = 0.0;

  int stations = 15;
  double marker_pixel_noise = 0.2;
  MarkerSpec marker;
  Pose ee_to_marker;
  double robot_rot_noise_deg = 0.0;
  double robot_trans_noise = 0.0;
  bool all_pairs = false;
  bool refine_hand_eye = false;

  std::string object_id = "box";
  ShapeSpec object;
  int faces = 3;
  GripperType gripper = GripperType::TwoFinger;
  Vec3 teach_position{0.5, 0.0, 0.0};  // z is replaced by the resting height
  std::string created_at = "2024-01-01T00:00:00Z";

  int scenes = 20;
  std::optional<ShapeSpec> scene_object;  // unregistered shape placed instead of the object
  double scene_noise = 0.001;
  Vec2 region_min{0.4, -0.1};
  Vec2 region_max{0.6, 0.1};
  double yaw_range_deg = 360.0;  // scene yaw is teach yaw +- half of this

  Aabb workspace{Vec3(0.2, -0.4, -0.005), Vec3(0.9, 0.4, 0.5)};
  double voxel = 0.004;
  int normal_neighbors = 12;  // for point-to-plane matching
  IcpParams icp{60, 0.01, 1e-6, IcpVariant::PointToPlane};
  double accept_threshold = 0.7;

  Pose place_pose;
  double approach_offset = 0.1;

  double tol_rot_deg = 1.0;
  double tol_trans = 0.003;

  static PipelineConfig demo();
};

/// Missing keys keep the demo defaults. Throws ConfigError.
PipelineConfig config_from_json(const Json& j);
Json config_to_json(const PipelineConfig& c);

/// Reads `.toml` or `.json` by extension. Throws ConfigError or IoError.
PipelineConfig load_config(const std::filesystem::path& path);

struct PipelineRun {
  Json report;
  int exit_code = 0;  // 0 iff every stage succeeded and every scene was matched and planned
};

/// Calibration, hand-eye, face registration, scene generation, matching,
/// grasp transfer and planning. Stage failures are recorded in the report
/// instead of thrown. Output depends only on the config.
PipelineRun run_pipeline(const PipelineConfig& config);

}  // namespace pickplace
