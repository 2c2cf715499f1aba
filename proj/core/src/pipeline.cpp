#include "pickplace/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "pickplace/error.hpp"
#include "pickplace/handeye.hpp"
#include "pickplace/plan.hpp"
#include "pickplace/rng.hpp"
#include "pickplace/toml_lite.hpp"

namespace pickplace {

namespace {

// Sub-stream ids for mix_seed; changing one changes only that stage.
enum Stream : std::uint64_t {
  kBoardPoses = 1,
  kDepthCheck = 2,
  kStations = 3,
  kMarkerNoise = 4,
  kObjectModel = 5,
  kSceneModel = 6,
  kRobotNoise = 7,
  kCornerNoise = 100,
  kTeachView = 200,
  kScene = 1000,
};

Quat yaw(double rad) { return Quat(Eigen::AngleAxisd(rad, Vec3::UnitZ())); }

// -------- config --------

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, where + " must be a table");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw Error(ErrorKind::ConfigError, "unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Vec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::ConfigError, "expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

ShapeSpec shape_from_json(const Json& j, const std::string& where) {
  check_keys(j, {"kind", "dimensions", "sample_density"}, where);
  ShapeSpec s;
  s.kind = shape_from_string(j.at("kind").get<std::string>());
  s.dimensions = j.at("dimensions").get<std::vector<double>>();
  read(j, "sample_density", s.sample_density);
  s.validate();
  return s;
}

Json shape_to_json(const ShapeSpec& s) {
  return Json{{"kind", to_string(s.kind)}, {"dimensions", s.dimensions}, {"sample_density", s.sample_density}};
}

Json vec2_to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

// -------- report helpers --------

Json error_json(const std::string& stage, const Error& e) {
  return Json{{"stage", stage}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

Json skipped_json(const std::string& stage, const std::string& because) {
  return Json{{"stage", stage}, {"kind", "Skipped"}, {"message", "skipped: " + because + " failed"}};
}

Json pose_error_json(const PoseError& e) {
  return Json{{"rot_deg", rad2deg(e.rot_angle)}, {"trans_m", e.trans_dist}};
}

Json plan_to_json(const PickPlacePlan& plan) {
  Json out = Json::array();
  for (const Waypoint& w : plan.waypoints) {
    out.push_back(Json{{"label", w.label}, {"pose", pose_to_json(w.pose)}, {"gripper_action", to_string(w.action)}});
  }
  return out;
}

double rel_error(double est, double truth) { return std::abs(est - truth) / std::abs(truth); }

// Camera measurement expressed in robot_base through the estimated hand-eye,
// then segmented by box cropping and voxel thinning. A depth sensor reports no
// normals, so they are estimated when the ICP variant needs them.
PointCloud observe(const PointCloud& truth_base, const Pose& hand_eye_drift, const Pose& camera_est,
                   const PipelineConfig& c) {
  PointCloud measured = transformed(truth_base, hand_eye_drift, FrameId::robot_base());
  measured.normals.clear();
  PointCloud seg = crop_aabb(measured, c.workspace);
  if (seg.empty()) throw Error(ErrorKind::EmptyCloud, "nothing left after workspace cropping");
  if (c.voxel > 0.0) seg = voxel_downsample(seg, c.voxel);
  if (c.icp.variant == IcpVariant::PointToPlane) {
    seg = estimate_normals(seg, static_cast<std::size_t>(c.normal_neighbors), camera_est.translation);
  }
  return seg;
}

struct TaughtFace {
  RestingPose rest;
  double yaw = 0.0;
  Pose object_grasp;  // object frame
};

}  // namespace

PipelineConfig PipelineConfig::demo() {
  PipelineConfig c;
  c.camera = CameraIntrinsics{900.0, 900.0, 640.0, 360.0, 0.0, -0.05, 0.01};
  c.base_to_camera = look_at(Vec3(1.1, -0.45, 0.65), Vec3(0.5, 0.0, 0.0));
  c.marker.side_length = 0.15;
  c.all_pairs = true;
  c.refine_hand_eye = true;
  c.ee_to_marker = Pose(Quat(Eigen::AngleAxisd(deg2rad(30.0), Vec3::UnitZ())), Vec3(0.0, 0.0, 0.08));
  c.object = ShapeSpec{ShapeKind::Box, {0.12, 0.08, 0.04}, 2.0e5};
  c.place_pose = Pose(Quat(0.0, 1.0, 0.0, 0.0), Vec3(0.3, 0.45, 0.15));
  return c;
}

PipelineConfig config_from_json(const Json& j) {
  PipelineConfig c = PipelineConfig::demo();
  try {
    check_keys(j, {"seed", "camera", "calibration", "hand_eye", "object", "scenes", "segmentation", "matching", "plan",
                   "tolerance"},
               "config");
    read(j, "seed", c.seed);
    if (j.contains("camera")) {
      const Json& s = j.at("camera");
      check_keys(s, {"intrinsics", "base_to_camera"}, "camera");
      if (s.contains("intrinsics")) c.camera = intrinsics_from_json(s.at("intrinsics"));
      if (s.contains("base_to_camera")) c.base_to_camera = pose_from_json(s.at("base_to_camera"));
    }
    if (j.contains("calibration")) {
      const Json& s = j.at("calibration");
      check_keys(s, {"views", "pixel_noise", "distance", "board", "depth_points", "depth_noise", "depth_bias"},
                 "calibration");
      read(s, "views", c.calib_views);
      read(s, "pixel_noise", c.calib_pixel_noise);
      read(s, "distance", c.calib_distance);
      read(s, "depth_points", c.depth_points);
      read(s, "depth_noise", c.depth_noise);
      read(s, "depth_bias", c.depth_bias);
      if (s.contains("board")) {
        const Json& b = s.at("board");
        check_keys(b, {"cols", "rows", "square_size_m"}, "calibration.board");
        read(b, "cols", c.board.cols);
        read(b, "rows", c.board.rows);
        read(b, "square_size_m", c.board.square_size_m);
      }
    }
    if (j.contains("hand_eye")) {
      const Json& s = j.at("hand_eye");
      check_keys(s, {"stations", "pixel_noise", "marker_side", "ee_to_marker", "robot_rot_noise_deg",
                     "robot_trans_noise", "all_pairs", "refine"},
                 "hand_eye");
      read(s, "all_pairs", c.all_pairs);
      read(s, "refine", c.refine_hand_eye);
      read(s, "stations", c.stations);
      read(s, "pixel_noise", c.marker_pixel_noise);
      read(s, "marker_side", c.marker.side_length);
      read(s, "robot_rot_noise_deg", c.robot_rot_noise_deg);
      read(s, "robot_trans_noise", c.robot_trans_noise);
      if (s.contains("ee_to_marker")) c.ee_to_marker = pose_from_json(s.at("ee_to_marker"));
    }
    if (j.contains("object")) {
      const Json& s = j.at("object");
      check_keys(s, {"id", "shape", "faces", "gripper", "teach_position", "created_at"}, "object");
      read(s, "id", c.object_id);
      if (s.contains("shape")) c.object = shape_from_json(s.at("shape"), "object.shape");
      read(s, "faces", c.faces);
      if (s.contains("gripper")) c.gripper = gripper_from_string(s.at("gripper").get<std::string>());
      if (s.contains("teach_position")) c.teach_position = vec3_from_json(s.at("teach_position"));
      read(s, "created_at", c.created_at);
    }
    if (j.contains("scenes")) {
      const Json& s = j.at("scenes");
      check_keys(s, {"count", "shape", "noise_sigma", "region_min", "region_max", "yaw_range_deg"}, "scenes");
      read(s, "count", c.scenes);
      if (s.contains("shape")) c.scene_object = shape_from_json(s.at("shape"), "scenes.shape");
      read(s, "noise_sigma", c.scene_noise);
      if (s.contains("region_min")) c.region_min = vec2_from_json(s.at("region_min"));
      if (s.contains("region_max")) c.region_max = vec2_from_json(s.at("region_max"));
      read(s, "yaw_range_deg", c.yaw_range_deg);
    }
    if (j.contains("segmentation")) {
      const Json& s = j.at("segmentation");
      check_keys(s, {"workspace_min", "workspace_max", "voxel", "normal_neighbors"}, "segmentation");
      read(s, "normal_neighbors", c.normal_neighbors);
      if (s.contains("workspace_min")) c.workspace.min = vec3_from_json(s.at("workspace_min"));
      if (s.contains("workspace_max")) c.workspace.max = vec3_from_json(s.at("workspace_max"));
      read(s, "voxel", c.voxel);
    }
    if (j.contains("matching")) {
      const Json& s = j.at("matching");
      check_keys(s, {"icp", "accept_threshold"}, "matching");
      if (s.contains("icp")) c.icp = icp_params_from_json(s.at("icp"));
      read(s, "accept_threshold", c.accept_threshold);
    }
    if (j.contains("plan")) {
      const Json& s = j.at("plan");
      check_keys(s, {"place_pose", "approach_offset"}, "plan");
      if (s.contains("place_pose")) c.place_pose = pose_from_json(s.at("place_pose"));
      read(s, "approach_offset", c.approach_offset);
    }
    if (j.contains("tolerance")) {
      const Json& s = j.at("tolerance");
      check_keys(s, {"rot_deg", "trans_m"}, "tolerance");
      read(s, "rot_deg", c.tol_rot_deg);
      read(s, "trans_m", c.tol_trans);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }

  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorKind::ConfigError, msg);
  };
  require(c.calib_views >= 3, "calibration.views must be >= 3");
  require(c.calib_pixel_noise >= 0.0 && c.marker_pixel_noise >= 0.0 && c.scene_noise >= 0.0 && c.depth_noise >= 0.0,
          "noise levels must be >= 0");
  require(c.depth_points >= 3, "calibration.depth_points must be >= 3");
  require(c.stations >= 3, "hand_eye.stations must be >= 3");
  require(c.marker.side_length > 0.0, "hand_eye.marker_side must be positive");
  require(c.robot_rot_noise_deg >= 0.0 && c.robot_trans_noise >= 0.0, "robot noise must be >= 0");
  require(!c.object_id.empty(), "object.id must be nonempty");
  require(c.faces >= 1, "object.faces must be >= 1");
  require(c.scenes >= 0, "scenes.count must be >= 0");
  require((c.region_max - c.region_min).minCoeff() >= 0.0, "scenes.region_min must not exceed region_max");
  require(c.voxel >= 0.0, "segmentation.voxel must be >= 0");
  require(c.normal_neighbors >= 3, "segmentation.normal_neighbors must be >= 3");
  require(c.accept_threshold >= 0.0 && c.accept_threshold <= 1.0, "matching.accept_threshold must lie in [0, 1]");
  require(c.approach_offset > 0.0, "plan.approach_offset must be positive");
  c.camera.validate();
  return c;
}

Json config_to_json(const PipelineConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["camera"] = {{"intrinsics", intrinsics_to_json(c.camera)}, {"base_to_camera", pose_to_json(c.base_to_camera)}};
  j["calibration"] = {{"views", c.calib_views},
                      {"pixel_noise", c.calib_pixel_noise},
                      {"distance", c.calib_distance},
                      {"board", {{"cols", c.board.cols}, {"rows", c.board.rows}, {"square_size_m", c.board.square_size_m}}},
                      {"depth_points", c.depth_points},
                      {"depth_noise", c.depth_noise},
                      {"depth_bias", c.depth_bias}};
  j["hand_eye"] = {{"stations", c.stations},
                   {"pixel_noise", c.marker_pixel_noise},
                   {"marker_side", c.marker.side_length},
                   {"ee_to_marker", pose_to_json(c.ee_to_marker)},
                   {"robot_rot_noise_deg", c.robot_rot_noise_deg},
                   {"robot_trans_noise", c.robot_trans_noise},
                   {"all_pairs", c.all_pairs},
                   {"refine", c.refine_hand_eye}};
  j["object"] = {{"id", c.object_id},
                 {"shape", shape_to_json(c.object)},
                 {"faces", c.faces},
                 {"gripper", to_string(c.gripper)},
                 {"teach_position", vec3_to_json(c.teach_position)},
                 {"created_at", c.created_at}};
  j["scenes"] = {{"count", c.scenes},
                 {"noise_sigma", c.scene_noise},
                 {"region_min", vec2_to_json(c.region_min)},
                 {"region_max", vec2_to_json(c.region_max)},
                 {"yaw_range_deg", c.yaw_range_deg}};
  if (c.scene_object) j["scenes"]["shape"] = shape_to_json(*c.scene_object);
  j["segmentation"] = {{"workspace_min", vec3_to_json(c.workspace.min)},
                       {"workspace_max", vec3_to_json(c.workspace.max)},
                       {"voxel", c.voxel},
                       {"normal_neighbors", c.normal_neighbors}};
  j["matching"] = {{"icp", icp_params_to_json(c.icp)}, {"accept_threshold", c.accept_threshold}};
  j["plan"] = {{"place_pose", pose_to_json(c.place_pose)}, {"approach_offset", c.approach_offset}};
  j["tolerance"] = {{"rot_deg", c.tol_rot_deg}, {"trans_m", c.tol_trans}};
  return j;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    if (path.extension() == ".toml") {
      j = parse_toml(ss.str());
    } else {
      j = Json::parse(ss.str());
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

PipelineRun run_pipeline(const PipelineConfig& c) {
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["seed"] = c.seed;
  report["config"] = config_to_json(c);
  report["truth"] = {{"intrinsics", intrinsics_to_json(c.camera)},
                     {"base_to_camera", pose_to_json(c.base_to_camera)},
                     {"ee_to_marker", pose_to_json(c.ee_to_marker)}};
  bool ok = true;

  // Calibration.
  Json calib = {{"status", "error"}, {"error", nullptr}, {"intrinsics", nullptr}, {"rms_px", nullptr},
                {"initial_rms_px", nullptr}, {"iterations", nullptr}, {"relative_error", nullptr},
                {"depth_check", nullptr}};
  std::optional<CameraIntrinsics> k_est;
  try {
    const std::vector<Pose> boards = synth_board_poses(c.board, c.calib_views, c.calib_distance,
                                                       mix_seed(c.seed, kBoardPoses));
    std::vector<PlanarView> views;
    for (std::size_t i = 0; i < boards.size(); ++i) {
      views.push_back(synth_planar_view(c.camera, c.board, boards[i], c.calib_pixel_noise,
                                        mix_seed(c.seed, kCornerNoise + i)));
    }
    const CalibrationResult cal = calibrate_camera(views);
    k_est = cal.intrinsics;
    calib["intrinsics"] = intrinsics_to_json(cal.intrinsics);
    calib["rms_px"] = cal.rms_px;
    calib["initial_rms_px"] = cal.initial_rms_px;
    calib["iterations"] = cal.iterations;
    calib["relative_error"] = {{"fx", rel_error(cal.intrinsics.fx, c.camera.fx)},
                               {"fy", rel_error(cal.intrinsics.fy, c.camera.fy)},
                               {"cx", rel_error(cal.intrinsics.cx, c.camera.cx)},
                               {"cy", rel_error(cal.intrinsics.cy, c.camera.cy)}};

    // A flat patch of the table seen by the depth sensor.
    Rng rng(mix_seed(c.seed, kDepthCheck));
    PointCloud table;
    for (int i = 0; i < c.depth_points; ++i) {
      table.points.emplace_back(rng.uniform(c.region_min.x(), c.region_max.x()),
                                rng.uniform(c.region_min.y(), c.region_max.y()),
                                c.depth_bias + rng.normal(0.0, c.depth_noise));
    }
    const DepthDeviation dev = depth_deviation(table, Vec3::UnitZ(), 0.0);
    calib["depth_check"] = {{"injected_bias", c.depth_bias}, {"mean", dev.mean}, {"rms", dev.rms}, {"max", dev.max}};
    calib["status"] = "ok";
  } catch (const Error& e) {
    calib["error"] = error_json("calibration", e);
    ok = false;
  }
  report["calibration"] = calib;

  // Hand-eye.
  Json he = {{"status", "error"}, {"error", nullptr}, {"result", nullptr}, {"error_vs_truth", nullptr},
             {"max_marker_rms_px", nullptr}};
  std::optional<Pose> base_to_camera_est;
  if (!k_est) {
    he["error"] = skipped_json("hand_eye", "calibration");
  } else {
    try {
      const std::vector<StationSample> truth =
          synth_stations({c.base_to_camera, c.ee_to_marker}, c.stations, mix_seed(c.seed, kStations));
      Rng pixel_rng(mix_seed(c.seed, kMarkerNoise));
      std::vector<StationSample> measured;
      double max_rms = 0.0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        std::array<Vec2, 4> px;
        const auto corners = c.marker.corners();
        for (int k = 0; k < 4; ++k) {
          px[k] = project(c.camera, transform_point(truth[i].cam_to_marker, corners[k]));
          if (c.marker_pixel_noise > 0.0) {
            px[k] += Vec2(pixel_rng.normal(0.0, c.marker_pixel_noise), pixel_rng.normal(0.0, c.marker_pixel_noise));
          }
        }
        const MarkerPose mp = marker_pnp(*k_est, c.marker, px);
        max_rms = std::max(max_rms, mp.rms_px);
        Pose ee = truth[i].base_to_ee;
        if (c.robot_rot_noise_deg > 0.0 || c.robot_trans_noise > 0.0) {
          ee = perturb_pose(ee, deg2rad(c.robot_rot_noise_deg), c.robot_trans_noise,
                            mix_seed(mix_seed(c.seed, kRobotNoise), i));
        }
        measured.push_back({ee, mp.cam_to_marker});
      }
      HandEyeOptions opt;
      opt.all_pairs = c.all_pairs;
      opt.refine = c.refine_hand_eye;
      const HandEyeResult r = calibrate_eye_to_hand(measured, opt);
      base_to_camera_est = r.base_to_camera;
      he["result"] = hand_eye_to_json(r);
      he["error_vs_truth"] = pose_error_json(pose_error(c.base_to_camera, r.base_to_camera));
      he["max_marker_rms_px"] = max_rms;
      he["status"] = "ok";
    } catch (const Error& e) {
      he["error"] = error_json("hand_eye", e);
      ok = false;
    }
  }
  report["hand_eye"] = he;

  // Face registration.
  Json reg = {{"status", "error"}, {"error", nullptr}, {"object_id", c.object_id}, {"faces", nullptr}};
  GraspDb db;
  std::vector<TaughtFace> taught;
  std::optional<Pose> drift;
  if (base_to_camera_est) drift = compose(*base_to_camera_est, invert(c.base_to_camera));
  if (!drift) {
    reg["error"] = skipped_json("registration", "hand_eye");
  } else {
    try {
      const PointCloud model = synth_cloud(c.object, mix_seed(c.seed, kObjectModel));
      const std::vector<RestingPose> rests = resting_poses(c.object);
      Json faces = Json::array();
      for (int i = 0; i < c.faces; ++i) {
        const std::size_t nr = rests.size();
        TaughtFace f{rests[static_cast<std::size_t>(i) % nr], deg2rad(90.0) * static_cast<double>(i / nr),
                     Pose::identity()};
        f.object_grasp = default_grasp(c.object, f.rest);
        const Pose teach_pose(yaw(f.yaw) * f.rest.orientation,
                              Vec3(c.teach_position.x(), c.teach_position.y(), f.rest.height));
        const ViewSpec view{teach_pose, c.base_to_camera, c.scene_noise, Visibility::CameraFacing,
                            mix_seed(c.seed, kTeachView + static_cast<std::uint64_t>(i))};
        const PointCloud cloud = observe(simulate_view(model, view), *drift, *base_to_camera_est, c);
        // The demonstrated grasp is read from the robot, so it is exact in robot_base.
        const Pose grasp = compose(teach_pose, f.object_grasp);
        const std::string id = db.register_face(c.object_id, cloud, grasp, c.gripper, c.created_at);
        faces.push_back(Json{{"face_id", id},
                             {"rest", f.rest.name},
                             {"teach_pose", pose_to_json(teach_pose)},
                             {"grasp", pose_to_json(grasp)},
                             {"points", cloud.size()}});
        taught.push_back(f);
      }
      reg["faces"] = faces;
      reg["status"] = "ok";
    } catch (const Error& e) {
      reg["error"] = error_json("registration", e);
      ok = false;
      db = GraspDb();
    }
  }
  report["registration"] = reg;

  // Scenes.
  const bool registered_scene = !c.scene_object.has_value();
  const ShapeSpec& scene_shape = registered_scene ? c.object : *c.scene_object;
  Json scenes = Json::array();
  int matched = 0, planned = 0, within = 0, no_match = 0;
  std::optional<PointCloud> scene_model;
  std::optional<Error> model_error;
  try {
    scene_model = synth_cloud(scene_shape, mix_seed(c.seed, registered_scene ? kObjectModel : kSceneModel));
  } catch (const Error& e) {
    model_error = e;
  }
  const std::vector<RestingPose> scene_rests = resting_poses(scene_shape);

  for (int i = 0; i < c.scenes; ++i) {
    const std::uint64_t seed_i = mix_seed(c.seed, kScene + static_cast<std::uint64_t>(i));
    Json s = {{"index", i},         {"seed", seed_i},          {"shape", to_string(scene_shape.kind)},
              {"registered_shape", registered_scene},          {"rest", nullptr},
              {"truth_object_pose", nullptr},                  {"points", nullptr},
              {"status", "error"},  {"error", nullptr},        {"match", nullptr},
              {"grasp", nullptr},   {"grasp_error", nullptr},  {"within_tolerance", nullptr},
              {"plan", nullptr}};
    std::string stage = "scene";
    try {
      if (model_error) throw *model_error;
      Rng rng(seed_i);
      RestingPose rest;
      double base_yaw = 0.0;
      if (registered_scene && !taught.empty()) {
        const auto f = std::min(taught.size() - 1, static_cast<std::size_t>(rng.uniform() * taught.size()));
        rest = taught[f].rest;
        base_yaw = taught[f].yaw;
      } else {
        const auto r = std::min(scene_rests.size() - 1, static_cast<std::size_t>(rng.uniform() * scene_rests.size()));
        rest = scene_rests[r];
      }
      const double half = 0.5 * deg2rad(c.yaw_range_deg);
      const double z_yaw = base_yaw + rng.uniform(-half, half);
      const Vec2 xy(rng.uniform(c.region_min.x(), c.region_max.x()), rng.uniform(c.region_min.y(), c.region_max.y()));
      const Pose object_pose(yaw(z_yaw) * rest.orientation, Vec3(xy.x(), xy.y(), rest.height));
      s["rest"] = rest.name;
      s["truth_object_pose"] = pose_to_json(object_pose);

      if (!drift || db.empty()) {
        s["error"] = skipped_json("scene", drift ? "registration" : "hand_eye");
        ok = false;
        scenes.push_back(std::move(s));
        continue;
      }
      const ViewSpec view{object_pose, c.base_to_camera, c.scene_noise, Visibility::CameraFacing, rng.next_u64()};
      const PointCloud scan = observe(simulate_view(*scene_model, view), *drift, *base_to_camera_est, c);
      s["points"] = scan.size();

      stage = "match";
      const MatchResult m = match_object(db, scan, c.icp, c.accept_threshold);
      ++matched;
      s["match"] = {{"object_id", m.object_id}, {"face_id", m.face_id}, {"alignment", alignment_to_json(m.alignment)}};
      s["grasp"] = pose_to_json(m.grasp_in_scene);

      stage = "plan";
      const PickPlacePlan plan = plan_pick_place(m.grasp_in_scene, c.place_pose, c.approach_offset);
      ++planned;
      s["plan"] = plan_to_json(plan);
      s["status"] = "ok";

      if (registered_scene) {
        const std::size_t face = std::stoul(m.face_id.substr(m.face_id.rfind('_') + 1));
        const PoseError e = symmetric_pose_error(scene_shape, object_pose, taught.at(face).object_grasp,
                                                 m.grasp_in_scene);
        const bool in_tol = e.rot_angle <= deg2rad(c.tol_rot_deg) && e.trans_dist <= c.tol_trans;
        within += in_tol ? 1 : 0;
        s["grasp_error"] = pose_error_json(e);
        s["within_tolerance"] = in_tol;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoMatch) ++no_match;
      s["error"] = error_json(stage, e);
      ok = false;
    }
    scenes.push_back(std::move(s));
  }
  report["scenes"] = scenes;

  const int exit_code = ok && planned == c.scenes ? 0 : 1;
  report["summary"] = {{"scenes", c.scenes},   {"matched", matched},   {"planned", planned},
                       {"no_match", no_match}, {"within_tolerance", within}, {"exit_code", exit_code}};
  return {report, exit_code};
}

}  // namespace pickplace
