#include "pickplace/json_io.hpp"

#include <fstream>
#include <sstream>

#include "pickplace/error.hpp"

namespace pickplace {

namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorKind::ParseError, std::string(what) + " must be a number");
  return j.get<double>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace

Json vec3_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::ParseError, "expected a 3-element array");
  return {number(j[0], "x"), number(j[1], "y"), number(j[2], "z")};
}

Json pose_to_json(const Pose& p) {
  const Quat q = canonical(p.rotation);
  return Json{{"q", Json::array({q.w(), q.x(), q.y(), q.z()})}, {"t", vec3_to_json(p.translation)}};
}

Pose pose_from_json(const Json& j) {
  const Json& q = field(j, "q");
  if (!q.is_array() || q.size() != 4) throw Error(ErrorKind::ParseError, "pose 'q' must have 4 elements");
  const Quat quat(number(q[0], "q.w"), number(q[1], "q.x"), number(q[2], "q.y"), number(q[3], "q.z"));
  if (std::abs(quat.norm() - 1.0) > 1e-6) throw Error(ErrorKind::ParseError, "pose quaternion is not unit length");
  return Pose(quat, vec3_from_json(field(j, "t")));
}

Json intrinsics_to_json(const CameraIntrinsics& k) {
  return Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"skew", k.skew}, {"k1", k.k1}, {"k2", k.k2}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  CameraIntrinsics k;
  k.fx = number(field(j, "fx"), "fx");
  k.fy = number(field(j, "fy"), "fy");
  k.cx = number(field(j, "cx"), "cx");
  k.cy = number(field(j, "cy"), "cy");
  k.skew = j.value("skew", 0.0);
  k.k1 = j.value("k1", 0.0);
  k.k2 = j.value("k2", 0.0);
  k.validate();
  return k;
}

Json icp_params_to_json(const IcpParams& p) {
  return Json{{"max_iterations", p.max_iterations},
              {"max_correspondence_dist", p.max_correspondence_dist},
              {"convergence_delta_rmse", p.convergence_delta_rmse},
              {"variant", p.variant == IcpVariant::PointToPoint ? "point_to_point" : "point_to_plane"}};
}

IcpParams icp_params_from_json(const Json& j) {
  IcpParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "icp params must be an object");
  p.max_iterations = j.value("max_iterations", p.max_iterations);
  p.max_correspondence_dist = j.value("max_correspondence_dist", p.max_correspondence_dist);
  p.convergence_delta_rmse = j.value("convergence_delta_rmse", p.convergence_delta_rmse);
  const std::string variant = j.value("variant", std::string("point_to_point"));
  if (variant == "point_to_point") {
    p.variant = IcpVariant::PointToPoint;
  } else if (variant == "point_to_plane") {
    p.variant = IcpVariant::PointToPlane;
  } else {
    throw Error(ErrorKind::ParseError, "unknown icp variant '" + variant + "'");
  }
  p.validate();
  return p;
}

Json alignment_to_json(const AlignmentResult& r) {
  return Json{{"transform", pose_to_json(r.transform)},
              {"fitness", r.fitness},
              {"inlier_rmse", r.inlier_rmse},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

Json hand_eye_to_json(const HandEyeResult& r) {
  return Json{{"base_to_camera", pose_to_json(r.base_to_camera)},
              {"ee_to_marker", pose_to_json(r.ee_to_marker)},
              {"rot_residual", r.rot_residual},
              {"trans_residual", r.trans_residual},
              {"parent_frame", "robot_base"},
              {"child_frame", "camera"}};
}

std::vector<PlanarView> views_from_json(const Json& j) {
  const Json* list = &j;
  std::vector<Vec3> board_points;
  if (j.is_object()) {
    const Json& board = field(j, "board");
    BoardSpec spec;
    spec.cols = board.value("cols", spec.cols);
    spec.rows = board.value("rows", spec.rows);
    spec.square_size_m = board.value("square_size_m", spec.square_size_m);
    if (spec.cols < 2 || spec.rows < 2 || !(spec.square_size_m > 0.0)) {
      throw Error(ErrorKind::ParseError, "invalid board spec");
    }
    board_points = spec.object_points();
    list = &field(j, "views");
  }
  if (!list->is_array()) throw Error(ErrorKind::ParseError, "views must be a list");

  std::vector<PlanarView> views;
  for (const Json& v : *list) {
    PlanarView view;
    if (v.contains("object")) {
      for (const Json& p : v.at("object")) view.object_points.push_back(vec3_from_json(p));
    } else {
      view.object_points = board_points;
    }
    for (const Json& p : field(v, "image")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::ParseError, "image points must be [u, v]");
      view.image_points.emplace_back(number(p[0], "u"), number(p[1], "v"));
    }
    if (view.object_points.size() != view.image_points.size()) {
      throw Error(ErrorKind::ParseError, "view " + std::to_string(views.size()) + " has mismatched point counts");
    }
    for (const Vec3& p : view.object_points) {
      if (p.z() != 0.0) throw Error(ErrorKind::ParseError, "board object points must have z = 0");
    }
    views.push_back(std::move(view));
  }
  return views;
}

Json views_to_json(const std::vector<PlanarView>& views) {
  Json out = Json::array();
  for (const PlanarView& v : views) {
    Json obj = Json::array(), img = Json::array();
    for (const Vec3& p : v.object_points) obj.push_back(vec3_to_json(p));
    for (const Vec2& p : v.image_points) img.push_back(Json::array({p.x(), p.y()}));
    out.push_back(Json{{"object", obj}, {"image", img}});
  }
  return out;
}

std::vector<StationSample> stations_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "station file must be a list");
  std::vector<StationSample> out;
  for (const Json& s : j) {
    out.push_back({pose_from_json(field(s, "base_to_ee")), pose_from_json(field(s, "cam_to_marker"))});
  }
  return out;
}

Json stations_to_json(const std::vector<StationSample>& stations) {
  Json out = Json::array();
  for (const StationSample& s : stations) {
    out.push_back(Json{{"base_to_ee", pose_to_json(s.base_to_ee)}, {"cam_to_marker", pose_to_json(s.cam_to_marker)}});
  }
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace pickplace
