#include "pickplace/sim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "pickplace/error.hpp"
#include "pickplace/rng.hpp"

namespace pickplace {

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Box: return "box";
    case ShapeKind::Cylinder: return "cylinder";
    case ShapeKind::LShape: return "lshape";
  }
  return "box";
}

ShapeKind shape_from_string(const std::string& s) {
  if (s == "box") return ShapeKind::Box;
  if (s == "cylinder") return ShapeKind::Cylinder;
  if (s == "lshape") return ShapeKind::LShape;
  throw Error(ErrorKind::InvalidSpec, "unknown shape kind '" + s + "'");
}

void ShapeSpec::validate() const {
  const std::size_t want = kind == ShapeKind::Box ? 3 : kind == ShapeKind::Cylinder ? 2 : 4;
  if (dimensions.size() != want) {
    throw Error(ErrorKind::InvalidSpec, to_string(kind) + " needs " + std::to_string(want) + " dimensions");
  }
  for (double d : dimensions) {
    if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::InvalidSpec, "dimensions must be positive");
  }
  if (!(sample_density > 0.0)) throw Error(ErrorKind::InvalidSpec, "sample density must be positive");
  if (kind == ShapeKind::LShape && (dimensions[2] >= dimensions[0] || dimensions[2] >= dimensions[1])) {
    throw Error(ErrorKind::InvalidSpec, "lshape thickness must be smaller than both legs");
  }
}

Vec3 ShapeSpec::half_extents() const {
  switch (kind) {
    case ShapeKind::Box: return 0.5 * Vec3(dimensions[0], dimensions[1], dimensions[2]);
    case ShapeKind::Cylinder: return {dimensions[0], dimensions[0], 0.5 * dimensions[1]};
    case ShapeKind::LShape: return 0.5 * Vec3(dimensions[0], dimensions[1], dimensions[3]);
  }
  return Vec3::Zero();
}

namespace {

std::size_t sample_count(double area, double density) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(area * density)));
}

// Uniform samples on the parallelogram origin + u * eu + v * ev.
void sample_rect(PointCloud& out, Rng& rng, const Vec3& origin, const Vec3& eu, const Vec3& ev, const Vec3& normal,
                 double density) {
  const std::size_t n = sample_count(eu.norm() * ev.norm(), density);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    out.points.push_back(origin + u * eu + v * ev);
    out.normals.push_back(normal);
  }
}

void sample_box(PointCloud& out, Rng& rng, const Vec3& lo, const Vec3& hi, double density) {
  const Vec3 size = hi - lo;
  for (int axis = 0; axis < 3; ++axis) {
    const int a = (axis + 1) % 3, b = (axis + 2) % 3;
    Vec3 eu = Vec3::Zero(), ev = Vec3::Zero();
    eu[a] = size[a];
    ev[b] = size[b];
    for (int sign : {1, -1}) {
      Vec3 origin = lo;
      if (sign > 0) origin[axis] = hi[axis];
      Vec3 n = Vec3::Zero();
      n[axis] = sign;
      sample_rect(out, rng, origin, eu, ev, n, density);
    }
  }
}

void sample_cylinder(PointCloud& out, Rng& rng, double r, double h, double density) {
  const std::size_t side = sample_count(2.0 * kPi * r * h, density);
  for (std::size_t i = 0; i < side; ++i) {
    const double th = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 n(std::cos(th), std::sin(th), 0.0);
    out.points.emplace_back(r * n.x(), r * n.y(), rng.uniform(-0.5 * h, 0.5 * h));
    out.normals.push_back(n);
  }
  const std::size_t cap = sample_count(kPi * r * r, density);
  for (double sign : {1.0, -1.0}) {
    for (std::size_t i = 0; i < cap; ++i) {
      const double rad = r * std::sqrt(rng.uniform());
      const double th = rng.uniform(0.0, 2.0 * kPi);
      out.points.emplace_back(rad * std::cos(th), rad * std::sin(th), sign * 0.5 * h);
      out.normals.emplace_back(0.0, 0.0, sign);
    }
  }
}

void sample_lshape(PointCloud& out, Rng& rng, double lx, double ly, double t, double h, double density) {
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  // Top and bottom, each split into the x leg and the remainder of the y leg.
  for (double z : {h, 0.0}) {
    const Vec3 n = z > 0.0 ? ez : Vec3(-ez);
    sample_rect(out, rng, Vec3(0, 0, z), lx * ex, t * ey, n, density);
    sample_rect(out, rng, Vec3(0, t, z), t * ex, (ly - t) * ey, n, density);
  }
  sample_rect(out, rng, Vec3(0, 0, 0), ly * ey, h * ez, -ex, density);      // outer x = 0
  sample_rect(out, rng, Vec3(0, 0, 0), lx * ex, h * ez, -ey, density);      // outer y = 0
  sample_rect(out, rng, Vec3(lx, 0, 0), t * ey, h * ez, ex, density);       // end of x leg
  sample_rect(out, rng, Vec3(0, ly, 0), t * ex, h * ez, ey, density);       // end of y leg
  sample_rect(out, rng, Vec3(t, t, 0), (lx - t) * ex, h * ez, ey, density); // inner y = t
  sample_rect(out, rng, Vec3(t, t, 0), (ly - t) * ey, h * ez, ex, density); // inner x = t
  const Vec3 centre(0.5 * lx, 0.5 * ly, 0.5 * h);
  for (Vec3& p : out.points) p -= centre;
}

}  // namespace

PointCloud synth_cloud(const ShapeSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  PointCloud out{.points = {}, .normals = {}, .frame = FrameId::object()};
  const auto& d = spec.dimensions;
  switch (spec.kind) {
    case ShapeKind::Box: {
      const Vec3 half = spec.half_extents();
      sample_box(out, rng, -half, half, spec.sample_density);
      break;
    }
    case ShapeKind::Cylinder:
      sample_cylinder(out, rng, d[0], d[1], spec.sample_density);
      break;
    case ShapeKind::LShape:
      sample_lshape(out, rng, d[0], d[1], d[2], d[3], spec.sample_density);
      break;
  }
  return out;
}

PointCloud simulate_view(const PointCloud& cloud, const ViewSpec& view) {
  if (!(view.noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  if (view.visibility == Visibility::CameraFacing && !cloud.has_normals()) {
    throw Error(ErrorKind::MissingNormals, "camera-facing culling needs normals");
  }
  const PointCloud placed = transformed(cloud, view.object_pose, FrameId::robot_base());
  const Vec3 cam = view.camera_pose.translation;

  PointCloud out{.points = {}, .normals = {}, .frame = FrameId::robot_base()};
  for (std::size_t i = 0; i < placed.size(); ++i) {
    if (view.visibility == Visibility::CameraFacing && !(placed.normals[i].dot(cam - placed.points[i]) > 0.0)) {
      continue;
    }
    out.points.push_back(placed.points[i]);
    if (placed.has_normals()) out.normals.push_back(placed.normals[i]);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyAfterCulling, "no point faces the camera");
  if (view.noise_sigma > 0.0) {
    Rng rng(view.seed);
    for (Vec3& p : out.points) p += rng.normal_vec3(view.noise_sigma);
  }
  return out;
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-9) x = z.cross(Vec3::UnitX());
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(r, eye);
}

std::vector<Quat> shape_symmetries(const ShapeSpec& spec, double step) {
  spec.validate();
  std::vector<Quat> out;
  switch (spec.kind) {
    case ShapeKind::Box: {
      const Vec3 dims = spec.half_extents();
      const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& p : perms) {
        for (int s = 0; s < 8; ++s) {
          Mat3 r = Mat3::Zero();
          bool fits = true;
          for (int row = 0; row < 3; ++row) {
            r(row, p[row]) = (s >> row) & 1 ? -1.0 : 1.0;
            if (std::abs(dims[row] - dims[p[row]]) > 1e-12) fits = false;
          }
          if (fits && r.determinant() > 0.0) out.push_back(canonical(Quat(r)));
        }
      }
      break;
    }
    case ShapeKind::Cylinder: {
      const int n = std::max(1, static_cast<int>(std::lround(2.0 * kPi / step)));
      const Quat flip(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
      for (int i = 0; i < n; ++i) {
        const Quat spin(Eigen::AngleAxisd(2.0 * kPi * i / n, Vec3::UnitZ()));
        out.push_back(canonical(spin));
        out.push_back(canonical(spin * flip));
      }
      break;
    }
    case ShapeKind::LShape: {
      out.push_back(Quat::Identity());
      const auto& d = spec.dimensions;
      if (std::abs(d[0] - d[1]) <= 1e-12) {
        out.push_back(canonical(Quat(Eigen::AngleAxisd(kPi, Vec3(1, 1, 0).normalized()))));
      }
      break;
    }
  }
  return out;
}

PoseError symmetric_pose_error(const ShapeSpec& spec, const Pose& truth_object_pose, const Pose& object_frame_pose,
                               const Pose& estimate) {
  PoseError best{kPi, std::numeric_limits<double>::infinity()};
  double best_score = std::numeric_limits<double>::infinity();
  for (const Quat& s : shape_symmetries(spec)) {
    const Pose truth = compose(truth_object_pose, compose(Pose::from_rotation(s), object_frame_pose));
    const PoseError e = pose_error(truth, estimate);
    const double score = e.rot_angle + e.trans_dist;
    if (score < best_score) {
      best_score = score;
      best = e;
    }
  }
  return best;
}

std::vector<RestingPose> resting_poses(const ShapeSpec& spec) {
  spec.validate();
  const Vec3 half = spec.half_extents();
  const Quat z_up = Quat::Identity();
  const Quat y_up(Eigen::AngleAxisd(kPi / 2.0, Vec3::UnitX()));
  const Quat x_up(Eigen::AngleAxisd(-kPi / 2.0, Vec3::UnitY()));
  if (spec.kind == ShapeKind::Cylinder) {
    return {{"standing", z_up, half.z()}, {"lying", canonical(y_up), half.x()}};
  }
  return {{"z_up", z_up, half.z()}, {"y_up", canonical(y_up), half.y()}, {"x_up", canonical(x_up), half.x()}};
}

Pose default_grasp(const ShapeSpec& spec, const RestingPose& rest) {
  // Find the top surface of a dense sample in the resting orientation.
  ShapeSpec dense = spec;
  dense.sample_density = std::max(spec.sample_density, 2.0e5);
  const PointCloud cloud = synth_cloud(dense, 0);
  const Mat3 r = rest.orientation.toRotationMatrix();
  double top = -std::numeric_limits<double>::infinity();
  for (const Vec3& p : cloud.points) top = std::max(top, (r * p).z());

  std::vector<Vec3> tops;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 p = r * cloud.points[i];
    if (p.z() >= top - 1e-9 && (r * cloud.normals[i]).z() > 0.99) tops.push_back(p);
  }
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : tops) mean += p;
  mean /= static_cast<double>(tops.size());

  Vec3 along = Vec3::UnitX();
  if (tops.size() >= 3) {
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const Vec3& p : tops) {
      const Vec2 d = (p - mean).head<2>();
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const Vec2 major = eig.eigenvectors().col(1);
    along = Vec3(major.x(), major.y(), 0.0).normalized();
    // Fix the sign so the grasp is reproducible.
    if (along.x() < -1e-12 || (std::abs(along.x()) <= 1e-12 && along.y() < 0.0)) along = -along;
  }

  // Gripper frame in the resting frame: z down into the object.
  const double depth = std::min(0.015, rest.height);
  Mat3 g;
  g.col(2) = -Vec3::UnitZ();
  g.col(0) = along;
  g.col(1) = g.col(2).cross(g.col(0));
  const Pose grasp_rest(g, mean - depth * Vec3::UnitZ());
  // Back to the object frame.
  return compose(Pose::from_rotation(rest.orientation.conjugate()), grasp_rest);
}

PlanarView synth_planar_view(const CameraIntrinsics& k, const BoardSpec& board, const Pose& board_to_camera,
                             double pixel_noise, std::uint64_t seed) {
  Rng rng(seed);
  PlanarView view;
  view.object_points = board.object_points();
  for (const Vec3& p : view.object_points) {
    Vec2 uv = project(k, transform_point(board_to_camera, p));
    if (pixel_noise > 0.0) uv += Vec2(rng.normal(0.0, pixel_noise), rng.normal(0.0, pixel_noise));
    view.image_points.push_back(uv);
  }
  return view;
}

std::vector<Pose> synth_board_poses(const BoardSpec& board, int count, double distance, std::uint64_t seed) {
  Rng rng(seed);
  const Vec3 centre_local(0.5 * (board.cols - 1) * board.square_size_m, 0.5 * (board.rows - 1) * board.square_size_m,
                          0.0);
  // Board z toward the camera.
  const Quat facing(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
  std::vector<Pose> out;
  for (int i = 0; i < count; ++i) {
    const double tilt = deg2rad(rng.uniform(20.0, 45.0));
    const double heading = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 tilt_axis(std::cos(heading), std::sin(heading), 0.0);
    const Quat spin(Eigen::AngleAxisd(deg2rad(rng.uniform(-30.0, 30.0)), Vec3::UnitZ()));
    const Quat r = canonical(Quat(Eigen::AngleAxisd(tilt, tilt_axis)) * facing * spin);
    const Vec3 centre(rng.uniform(-0.05, 0.05), rng.uniform(-0.04, 0.04), distance * rng.uniform(0.9, 1.1));
    out.emplace_back(r, centre - r * centre_local);
  }
  return out;
}

Pose perturb_pose(const Pose& p, double rot_sigma, double trans_sigma, std::uint64_t seed) {
  Rng rng(seed);
  const Vec3 w = rng.normal_vec3(rot_sigma);
  const Vec3 dt = rng.normal_vec3(trans_sigma);
  return Pose(rodrigues_exp(w) * p.rotation, p.translation + dt);
}

std::vector<StationSample> synth_stations(const HandEyeScene& scene, int count, std::uint64_t seed) {
  Rng rng(seed);
  const Quat facing(Eigen::AngleAxisd(kPi, Vec3::UnitX()));
  std::vector<StationSample> out;
  for (int i = 0; i < count; ++i) {
    const double tilt = deg2rad(rng.uniform(10.0, 40.0));
    const double heading = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 axis(std::cos(heading), std::sin(heading), 0.0);
    const Quat spin(Eigen::AngleAxisd(deg2rad(rng.uniform(-90.0, 90.0)), Vec3::UnitZ()));
    const Quat r = canonical(Quat(Eigen::AngleAxisd(tilt, axis)) * facing * spin);
    const Vec3 t(rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1), rng.uniform(0.6, 1.0));
    const Pose cam_to_marker(r, t);
    const Pose base_to_marker = compose(scene.base_to_camera, cam_to_marker);
    out.push_back({compose(base_to_marker, invert(scene.ee_to_marker)), cam_to_marker});
  }
  return out;
}

}  // namespace pickplace
