#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "pickplace/calib.hpp"
#include "pickplace/error.hpp"
#include "pickplace/graspdb.hpp"
#include "pickplace/handeye.hpp"
#include "pickplace/json_io.hpp"
#include "pickplace/pipeline.hpp"
#include "pickplace/plan.hpp"
#include "pickplace/ply.hpp"
#include "pickplace/register.hpp"
#include "pickplace/rng.hpp"
#include "pickplace/sim.hpp"

using namespace pickplace;

namespace {

// Exit codes: 0 success, 1 pipeline or match failure, 2 bad input.
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

PointCloud read_cloud(const std::string& path) {
  std::vector<std::string> warnings;
  PointCloud c = load_ply(path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return c;
}

// A pose given inline as JSON text or as a path to a JSON file.
Pose read_pose(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && arg[first] == '{') {
    try {
      return pose_from_json(Json::parse(arg));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("pose: ") + e.what());
    }
  }
  return pose_from_json(read_json_file(arg));
}

ShapeSpec parse_shape(const std::string& kind, const std::vector<double>& dims, double density) {
  ShapeSpec s;
  s.kind = shape_from_string(kind);
  s.dimensions = dims;
  s.sample_density = density;
  s.validate();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated vision-guided pick-and-place toolkit"};
  app.require_subcommand(1);

  // calibrate
  std::string views_path, calib_out;
  auto* calibrate = app.add_subcommand("calibrate", "Planar intrinsic calibration from board views");
  calibrate->add_option("--views", views_path, "Views JSON")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--out", calib_out, "Output JSON (default stdout)");

  // handeye
  std::string stations_path, he_out;
  bool all_pairs = false;
  auto* handeye = app.add_subcommand("handeye", "Eye-to-hand calibration from station samples");
  handeye->add_option("--stations", stations_path, "Stations JSON")->required()->check(CLI::ExistingFile);
  handeye->add_option("--out", he_out, "Output JSON (default stdout)");
  handeye->add_flag("--all-pairs", all_pairs, "Use every station pair instead of consecutive ones");

  // register
  std::string db_dir, object_id, cloud_path, grasp_arg, gripper = "two_finger";
  auto* reg = app.add_subcommand("register", "Teach one face: cloud plus grasp");
  reg->add_option("--db", db_dir, "Database directory")->required();
  reg->add_option("--object", object_id, "Object id")->required();
  reg->add_option("--cloud", cloud_path, "Segmented cloud (PLY, robot_base)")->required()->check(CLI::ExistingFile);
  reg->add_option("--grasp", grasp_arg, "Grasp pose JSON file or inline JSON")->required();
  reg->add_option("--gripper", gripper, "two_finger or three_finger")
      ->check(CLI::IsMember({"two_finger", "three_finger"}));

  // match
  std::string scanned_path, match_out, params_path;
  double threshold = 0.7;
  auto* match = app.add_subcommand("match", "Match a scanned cloud against the database");
  match->add_option("--db", db_dir, "Database directory")->required()->check(CLI::ExistingDirectory);
  match->add_option("--scanned", scanned_path, "Scanned cloud (PLY)")->required()->check(CLI::ExistingFile);
  match->add_option("--out", match_out, "Output JSON (default stdout)");
  match->add_option("--params", params_path, "ICP parameters JSON")->check(CLI::ExistingFile);
  match->add_option("--threshold", threshold, "Minimum fitness")->check(CLI::Range(0.0, 1.0));

  // align
  std::string registered_path, align_out;
  auto* align = app.add_subcommand("align", "Align a registered cloud onto a scanned cloud");
  align->add_option("--registered", registered_path, "Registered cloud (PLY)")->required()->check(CLI::ExistingFile);
  align->add_option("--scanned", scanned_path, "Scanned cloud (PLY)")->required()->check(CLI::ExistingFile);
  align->add_option("--params", params_path, "ICP parameters JSON")->check(CLI::ExistingFile);
  align->add_option("--out", align_out, "Output JSON (default stdout)");

  // plan
  std::string place_arg, plan_out;
  double offset = 0.1;
  auto* plan = app.add_subcommand("plan", "Waypoints for one pick and place");
  plan->add_option("--grasp", grasp_arg, "Grasp pose in scene")->required();
  plan->add_option("--place", place_arg, "Place pose")->required();
  plan->add_option("--offset", offset, "Approach offset, meters")->check(CLI::PositiveNumber);
  plan->add_option("--out", plan_out, "Output JSON (default stdout)");

  // simulate
  std::uint64_t seed = 1;
  std::string shape_kind = "box", sim_out, pose_arg, camera_arg;
  std::vector<double> dims{0.12, 0.08, 0.04};
  double density = 2.0e5, sigma = 0.0, distance = 0.6;
  int count = 10;
  bool camera_facing = false;
  auto* simulate = app.add_subcommand("simulate", "Synthetic data: cloud, views or stations");
  simulate->require_subcommand(1);
  auto* sim_cloud = simulate->add_subcommand("cloud", "Shape surface samples, optionally placed and culled (PLY)");
  sim_cloud->add_option("--shape", shape_kind, "box, cylinder or lshape");
  sim_cloud->add_option("--dims", dims, "Dimensions in meters")->delimiter(',');
  sim_cloud->add_option("--density", density, "Points per square meter");
  sim_cloud->add_option("--pose", pose_arg, "robot_base -> object pose; output frame becomes robot_base");
  sim_cloud->add_option("--camera", camera_arg, "robot_base -> camera pose for back-face culling");
  sim_cloud->add_flag("--camera-facing", camera_facing, "Keep only points facing the camera");
  sim_cloud->add_option("--noise", sigma, "Point noise sigma, meters");
  sim_cloud->add_option("--seed", seed, "RNG seed");
  sim_cloud->add_option("--out", sim_out, "Output PLY")->required();
  auto* sim_views = simulate->add_subcommand("views", "Board views through a camera (calibrate input)");
  std::string intr_path;
  double pixel_noise = 0.0;
  sim_views->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->check(CLI::ExistingFile);
  sim_views->add_option("--count", count, "Number of views")->check(CLI::PositiveNumber);
  sim_views->add_option("--distance", distance, "Board distance, meters");
  sim_views->add_option("--noise", pixel_noise, "Corner noise sigma, pixels");
  sim_views->add_option("--seed", seed, "RNG seed");
  sim_views->add_option("--out", sim_out, "Output JSON (default stdout)");
  auto* sim_stations = simulate->add_subcommand("stations", "Robot and marker pose pairs (handeye input)");
  std::string scene_base_to_camera, scene_ee_to_marker;
  double rot_noise_deg = 0.0, trans_noise = 0.0;
  sim_stations->add_option("--base-to-camera", scene_base_to_camera, "Ground-truth camera mounting pose");
  sim_stations->add_option("--ee-to-marker", scene_ee_to_marker, "Ground-truth marker offset");
  sim_stations->add_option("--count", count, "Number of stations")->check(CLI::PositiveNumber);
  sim_stations->add_option("--rot-noise-deg", rot_noise_deg, "Marker rotation noise sigma, degrees");
  sim_stations->add_option("--trans-noise", trans_noise, "Marker translation noise sigma, meters");
  sim_stations->add_option("--seed", seed, "RNG seed");
  sim_stations->add_option("--out", sim_out, "Output JSON (default stdout)");

  // run
  std::string config_path, run_out;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "End-to-end simulated pipeline");
  run->add_option("--config", config_path, "TOML or JSON config (default: demo)")->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Report JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage errors share the bad-input code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*calibrate) {
      const CalibrationResult r = calibrate_camera(views_from_json(read_json_file(views_path)));
      Json poses = Json::array();
      for (const Pose& p : r.poses) poses.push_back(pose_to_json(p));
      emit(Json{{"intrinsics", intrinsics_to_json(r.intrinsics)},
                {"board_to_camera", poses},
                {"rms_px", r.rms_px},
                {"initial_rms_px", r.initial_rms_px},
                {"iterations", r.iterations}},
           calib_out);
    } else if (*handeye) {
      HandEyeOptions opt;
      opt.all_pairs = all_pairs;
      emit(hand_eye_to_json(calibrate_eye_to_hand(stations_from_json(read_json_file(stations_path)), opt)), he_out);
    } else if (*reg) {
      GraspDb db = std::filesystem::exists(db_dir) ? load_db(db_dir) : GraspDb();
      const std::string id =
          db.register_face(object_id, read_cloud(cloud_path), read_pose(grasp_arg), gripper_from_string(gripper));
      save_db(db, db_dir);
      std::cout << id << '\n';
    } else if (*match) {
      const IcpParams params = params_path.empty() ? IcpParams{60, 0.01, 1e-6, IcpVariant::PointToPoint}
                                                   : icp_params_from_json(read_json_file(params_path));
      const MatchResult m = match_object(load_db(db_dir), read_cloud(scanned_path), params, threshold);
      emit(Json{{"object_id", m.object_id},
                {"face_id", m.face_id},
                {"alignment", alignment_to_json(m.alignment)},
                {"grasp_in_scene", pose_to_json(m.grasp_in_scene)}},
           match_out);
    } else if (*align) {
      const IcpParams params = params_path.empty() ? IcpParams{} : icp_params_from_json(read_json_file(params_path));
      emit(alignment_to_json(align_object(read_cloud(registered_path), read_cloud(scanned_path), params)), align_out);
    } else if (*plan) {
      const PickPlacePlan p = plan_pick_place(read_pose(grasp_arg), read_pose(place_arg), offset);
      Json wps = Json::array();
      for (const Waypoint& w : p.waypoints) {
        wps.push_back(Json{{"label", w.label}, {"pose", pose_to_json(w.pose)}, {"gripper_action", to_string(w.action)}});
      }
      emit(Json{{"waypoints", wps}, {"transit_length", p.transit_length()}}, plan_out);
    } else if (*sim_cloud) {
      PointCloud cloud = synth_cloud(parse_shape(shape_kind, dims, density), seed);
      if (!pose_arg.empty() || camera_facing || sigma > 0.0) {
        ViewSpec view;
        view.object_pose = pose_arg.empty() ? Pose::identity() : read_pose(pose_arg);
        view.camera_pose = camera_arg.empty() ? Pose::identity() : read_pose(camera_arg);
        view.noise_sigma = sigma;
        view.visibility = camera_facing ? Visibility::CameraFacing : Visibility::Full;
        view.seed = mix_seed(seed, 1);
        cloud = simulate_view(cloud, view);
      }
      save_ply(cloud, sim_out);
    } else if (*sim_views) {
      const CameraIntrinsics k =
          intr_path.empty() ? PipelineConfig::demo().camera : intrinsics_from_json(read_json_file(intr_path));
      const BoardSpec board;
      const std::vector<Pose> poses = synth_board_poses(board, count, distance, mix_seed(seed, 1));
      std::vector<PlanarView> views;
      for (std::size_t i = 0; i < poses.size(); ++i) {
        views.push_back(synth_planar_view(k, board, poses[i], pixel_noise, mix_seed(seed, 100 + i)));
      }
      emit(views_to_json(views), sim_out);
    } else if (*sim_stations) {
      const PipelineConfig demo = PipelineConfig::demo();
      const HandEyeScene scene{scene_base_to_camera.empty() ? demo.base_to_camera : read_pose(scene_base_to_camera),
                               scene_ee_to_marker.empty() ? demo.ee_to_marker : read_pose(scene_ee_to_marker)};
      std::vector<StationSample> stations = synth_stations(scene, count, mix_seed(seed, 1));
      for (std::size_t i = 0; i < stations.size(); ++i) {
        stations[i].cam_to_marker =
            perturb_pose(stations[i].cam_to_marker, deg2rad(rot_noise_deg), trans_noise, mix_seed(seed, 100 + i));
      }
      emit(stations_to_json(stations), sim_out);
    } else if (*run) {
      PipelineConfig cfg = config_path.empty() ? PipelineConfig::demo() : load_config(config_path);
      if (run_seed) cfg.seed = *run_seed;
      const PipelineRun r = run_pipeline(cfg);
      emit(r.report, run_out);
      const Json& s = r.report.at("summary");
      std::cerr << "scenes " << s.at("scenes") << ", matched " << s.at("matched") << ", planned " << s.at("planned")
                << ", within tolerance " << s.at("within_tolerance") << '\n';
      return r.exit_code == 0 ? 0 : kFailed;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::NoMatch ? kFailed : kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return 0;
}
