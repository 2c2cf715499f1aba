#include "pickplace/calib.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "lm.hpp"
#include "pickplace/error.hpp"

namespace pickplace {

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, skew, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return k;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorKind::InvalidArgument, "focal lengths must be positive");
}

Vec2 project(const CameraIntrinsics& k, const Vec3& cam_point) {
  if (!(cam_point.z() > 1e-9)) throw Error(ErrorKind::BehindCamera, "point is not in front of the camera");
  const double x = cam_point.x() / cam_point.z();
  const double y = cam_point.y() / cam_point.z();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + k.k1 * r2 + k.k2 * r2 * r2;
  const double xd = x * radial, yd = y * radial;
  return {k.fx * xd + k.skew * yd + k.cx, k.fy * yd + k.cy};
}

Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& pixel) {
  const double yd = (pixel.y() - k.cy) / k.fy;
  const double xd = (pixel.x() - k.cx - k.skew * yd) / k.fx;
  if (k.k1 == 0.0 && k.k2 == 0.0) return {xd, yd};
  // Newton on the radius: rd = r (1 + k1 r^2 + k2 r^4).
  const double rd = std::hypot(xd, yd);
  if (rd == 0.0) return {0.0, 0.0};
  double r = rd;
  for (int i = 0; i < 50; ++i) {
    const double r2 = r * r;
    const double f = r * (1.0 + k.k1 * r2 + k.k2 * r2 * r2) - rd;
    const double df = 1.0 + 3.0 * k.k1 * r2 + 5.0 * k.k2 * r2 * r2;
    const double step = f / df;
    r -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, r)) break;
  }
  const double scale = r / rd;
  return {xd * scale, yd * scale};
}

Vec3 unproject(const CameraIntrinsics& k, const Vec2& pixel, double depth) {
  const Vec2 n = undistort_normalized(k, pixel);
  return {n.x() * depth, n.y() * depth, depth};
}

std::vector<Vec3> BoardSpec::object_points() const {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(cols * rows));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) pts.emplace_back(c * square_size_m, r * square_size_m, 0.0);
  }
  return pts;
}

Vec2 Homography::apply(const Vec2& xy) const {
  const Eigen::Vector3d p = h * Eigen::Vector3d(xy.x(), xy.y(), 1.0);
  return p.head<2>() / p.z();
}

namespace {

// Hartley normalization: centroid to origin, mean distance sqrt(2).
Mat3 normalizer(const std::vector<Vec2>& pts) {
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double dist = 0.0;
  for (const Vec2& p : pts) dist += (p - mean).norm();
  dist /= static_cast<double>(pts.size());
  const double s = dist > 0.0 ? std::sqrt(2.0) / dist : 1.0;
  Mat3 t;
  t << s, 0.0, -s * mean.x(),
       0.0, s, -s * mean.y(),
       0.0, 0.0, 1.0;
  return t;
}

bool collinear(const std::vector<Vec2>& pts) {
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  return eig.eigenvalues()[0] <= 1e-12 * std::max(eig.eigenvalues()[1], 1e-300);
}

}  // namespace

Homography estimate_homography(const PlanarView& view) {
  const std::size_t n = view.object_points.size();
  if (n != view.image_points.size()) throw Error(ErrorKind::LengthMismatch, "object/image point counts differ");
  if (n < 4) throw Error(ErrorKind::DegenerateConfiguration, "homography needs at least 4 correspondences");

  std::vector<Vec2> obj(n);
  for (std::size_t i = 0; i < n; ++i) obj[i] = view.object_points[i].head<2>();
  if (collinear(obj) || collinear(view.image_points)) {
    throw Error(ErrorKind::DegenerateConfiguration, "correspondences are collinear");
  }

  const Mat3 tn_obj = normalizer(obj);
  const Mat3 tn_img = normalizer(view.image_points);
  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d x = tn_obj * Eigen::Vector3d(obj[i].x(), obj[i].y(), 1.0);
    const Eigen::Vector3d u = tn_img * Eigen::Vector3d(view.image_points[i].x(), view.image_points[i].y(), 1.0);
    const auto r0 = static_cast<Eigen::Index>(2 * i);
    a.row(r0) << -x.x(), -x.y(), -1.0, 0.0, 0.0, 0.0, u.x() * x.x(), u.x() * x.y(), u.x();
    a.row(r0 + 1) << 0.0, 0.0, 0.0, -x.x(), -x.y(), -1.0, u.y() * x.x(), u.y() * x.y(), u.y();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // A second (near) null vector means the solution is not unique.
  if (sv.size() >= 8 && sv[7] <= 1e-12 * sv[0]) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography is not uniquely determined");
  }
  const Eigen::VectorXd hv = svd.matrixV().col(8);
  Mat3 hn;
  hn << hv[0], hv[1], hv[2], hv[3], hv[4], hv[5], hv[6], hv[7], hv[8];
  Mat3 h = tn_img.inverse() * hn * tn_obj;
  if (std::abs(h(2, 2)) > 1e-300) h /= h(2, 2);
  if (std::abs(h.determinant()) <= 1e-12 * std::pow(h.norm(), 3)) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography is singular");
  }
  return {h};
}

namespace {

Eigen::Matrix<double, 1, 6> zhang_row(const Mat3& h, int i, int j) {
  const Eigen::Vector3d a = h.col(i), b = h.col(j);
  Eigen::Matrix<double, 1, 6> v;
  v << a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1], a[2] * b[0] + a[0] * b[2],
      a[2] * b[1] + a[1] * b[2], a[2] * b[2];
  return v;
}

}  // namespace

CameraIntrinsics zhang_intrinsics(const std::vector<Homography>& homographies) {
  if (homographies.size() < 3) {
    throw Error(ErrorKind::InsufficientViews,
                "need at least 3 views, got " + std::to_string(homographies.size()));
  }

  // Condition the constraint system by moving pixels to a unit-scale frame.
  Vec2 mean = Vec2::Zero();
  double scale = 0.0;
  for (const Homography& hg : homographies) {
    const Vec2 origin = hg.h.col(2).head<2>() / hg.h(2, 2);
    mean += origin;
    scale += origin.norm();
  }
  mean /= static_cast<double>(homographies.size());
  scale = std::max(scale / static_cast<double>(homographies.size()), 1.0);
  Mat3 t;
  t << 1.0 / scale, 0.0, -mean.x() / scale,
       0.0, 1.0 / scale, -mean.y() / scale,
       0.0, 0.0, 1.0;

  const auto n = static_cast<Eigen::Index>(homographies.size());
  Eigen::MatrixXd v(2 * n + 1, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    Mat3 h = t * homographies[static_cast<std::size_t>(i)].h;
    h /= h.norm();
    v.row(2 * i) = zhang_row(h, 0, 1);
    v.row(2 * i + 1) = zhang_row(h, 0, 0) - zhang_row(h, 1, 1);
  }
  // Zero skew: B12 = 0.
  v.row(2 * n) << 0.0, 1.0, 0.0, 0.0, 0.0, 0.0;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cond = sv[4] > 0.0 ? sv[0] / sv[4] : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    throw Error(ErrorKind::IllConditioned, "intrinsic constraint system condition number " + std::to_string(cond));
  }
  const Eigen::VectorXd b = svd.matrixV().col(5);
  const double b11 = b[0], b12 = b[1], b22 = b[2], b13 = b[3], b23 = b[4], b33 = b[5];

  const double den = b11 * b22 - b12 * b12;
  if (std::abs(den) < 1e-300 || b11 == 0.0) throw Error(ErrorKind::IllConditioned, "degenerate conic");
  const double v0 = (b12 * b13 - b11 * b23) / den;
  const double lambda = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11;
  const double alpha2 = lambda / b11;
  const double beta2 = lambda * b11 / den;
  if (!(alpha2 > 0.0) || !(beta2 > 0.0)) throw Error(ErrorKind::IllConditioned, "conic is not positive definite");
  const double alpha = std::sqrt(alpha2);
  const double beta = std::sqrt(beta2);
  const double gamma = -b12 * alpha2 * beta / lambda;
  const double u0 = gamma * v0 / beta - b13 * alpha2 / lambda;

  CameraIntrinsics k;
  k.fx = scale * alpha;
  k.fy = scale * beta;
  k.skew = scale * gamma;
  k.cx = scale * u0 + mean.x();
  k.cy = scale * v0 + mean.y();
  return k;
}

Pose extrinsics_from_homography(const CameraIntrinsics& k, const Homography& hg) {
  k.validate();
  const Mat3 kinv = k.matrix().inverse();
  const Eigen::Vector3d a1 = kinv * hg.h.col(0);
  const Eigen::Vector3d a2 = kinv * hg.h.col(1);
  const Eigen::Vector3d a3 = kinv * hg.h.col(2);
  const double n1 = a1.norm(), n2 = a2.norm();
  if (!(n1 > 1e-12) || !(n2 > 1e-12)) throw Error(ErrorKind::IllConditioned, "homography columns vanish");
  double lambda = 2.0 / (n1 + n2);
  // The board origin must land in front of the camera.
  if (lambda * a3.z() < 0.0) lambda = -lambda;
  const Eigen::Vector3d r1 = lambda * a1;
  const Eigen::Vector3d r2 = lambda * a2;
  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  const Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 ortho = svd.matrixU() * d * svd.matrixV().transpose();
  return Pose(ortho, lambda * a3);
}

namespace {

struct CalibState {
  CameraIntrinsics k;
  std::vector<Pose> poses;
};

constexpr int kIntrinsicParams = 6;

Eigen::VectorXd residual_vector(const std::vector<PlanarView>& views, const CameraIntrinsics& k,
                                const std::vector<Pose>& poses) {
  std::size_t total = 0;
  for (const PlanarView& v : views) total += v.object_points.size();
  Eigen::VectorXd r(static_cast<Eigen::Index>(2 * total));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Mat3 rot = poses[i].rotation_matrix();
    for (std::size_t j = 0; j < views[i].object_points.size(); ++j) {
      const Vec3 pc = rot * views[i].object_points[j] + poses[i].translation;
      const Vec2 uv = project(k, pc);
      r[row++] = uv.x() - views[i].image_points[j].x();
      r[row++] = uv.y() - views[i].image_points[j].y();
    }
  }
  return r;
}

void check_views(const std::vector<PlanarView>& views, std::size_t poses) {
  if (views.empty()) throw Error(ErrorKind::InsufficientViews, "no views");
  if (views.size() != poses) throw Error(ErrorKind::LengthMismatch, "one pose per view is required");
  for (const PlanarView& v : views) {
    if (v.object_points.size() != v.image_points.size()) {
      throw Error(ErrorKind::LengthMismatch, "object/image point counts differ");
    }
  }
}

}  // namespace

double reprojection_rms(const std::vector<PlanarView>& views, const CameraIntrinsics& k,
                        const std::vector<Pose>& poses) {
  check_views(views, poses.size());
  const Eigen::VectorXd r = residual_vector(views, k, poses);
  return r.size() == 0 ? 0.0 : std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

RefineResult refine_reprojection(const std::vector<PlanarView>& views, const CameraIntrinsics& k0,
                                 const std::vector<Pose>& poses0, const RefineOptions& options) {
  check_views(views, poses0.size());
  k0.validate();

  detail::LmProblem<CalibState> problem;
  problem.residuals = [&](const CalibState& s) { return residual_vector(views, s.k, s.poses); };
  problem.plus = [](const CalibState& s, const Eigen::VectorXd& d) {
    CalibState out = s;
    out.k.fx += d[0];
    out.k.fy += d[1];
    out.k.cx += d[2];
    out.k.cy += d[3];
    out.k.k1 += d[4];
    out.k.k2 += d[5];
    for (std::size_t i = 0; i < out.poses.size(); ++i) {
      const Eigen::Index o = kIntrinsicParams + 6 * static_cast<Eigen::Index>(i);
      out.poses[i] = Pose(rodrigues_exp(d.segment<3>(o)) * s.poses[i].rotation,
                          s.poses[i].translation + d.segment<3>(o + 3));
    }
    return out;
  };
  const auto n = static_cast<Eigen::Index>(kIntrinsicParams + 6 * poses0.size());
  problem.steps.resize(n);
  problem.steps.head<kIntrinsicParams>() << 1e-6 * k0.fx, 1e-6 * k0.fy, 1e-4, 1e-4, 1e-7, 1e-7;
  for (Eigen::Index i = kIntrinsicParams; i < n; ++i) problem.steps[i] = 1e-7;

  detail::LmSettings settings;
  settings.max_iterations = options.max_iterations;
  settings.relative_cost_tolerance = options.relative_cost_tolerance;

  const auto outcome = detail::levenberg_marquardt(problem, CalibState{k0, poses0}, settings);
  if (outcome.status == detail::LmStatus::Diverged) {
    throw Error(ErrorKind::DivergedRefinement, "cost did not decrease over 10 consecutive damping escalations");
  }
  const double count = static_cast<double>(problem.residuals(outcome.state).size());
  RefineResult out;
  out.intrinsics = outcome.state.k;
  out.poses = outcome.state.poses;
  out.rms_px = std::sqrt(2.0 * outcome.cost / count);
  out.initial_rms_px = std::sqrt(2.0 * outcome.initial_cost / count);
  out.iterations = outcome.iterations;
  return out;
}

CalibrationResult calibrate_camera(const std::vector<PlanarView>& views) {
  std::vector<Homography> hs;
  hs.reserve(views.size());
  for (const PlanarView& v : views) hs.push_back(estimate_homography(v));
  CameraIntrinsics k = zhang_intrinsics(hs);
  k.skew = 0.0;
  std::vector<Pose> poses;
  poses.reserve(hs.size());
  for (const Homography& h : hs) poses.push_back(extrinsics_from_homography(k, h));
  const RefineResult refined = refine_reprojection(views, k, poses);
  return {refined.intrinsics, refined.poses, refined.rms_px, refined.initial_rms_px, refined.iterations};
}

Quat average_rotation(const std::vector<Quat>& rotations) {
  if (rotations.empty()) throw Error(ErrorKind::EmptyInput, "no rotations to average");
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (const Quat& q : rotations) {
    const Eigen::Vector4d v = canonical(q).coeffs();
    m += v * v.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
  const Eigen::Vector4d top = eig.eigenvectors().col(3);
  return canonical(Quat(top[3], top[0], top[1], top[2]));
}

StereoResult stereo_extrinsic(const std::vector<std::pair<Pose, Pose>>& pairs) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "stereo extrinsic needs at least one pair");
  std::vector<Pose> rel;
  rel.reserve(pairs.size());
  for (const auto& [a, b] : pairs) rel.push_back(compose(a, invert(b)));

  StereoResult out;
  if (rel.size() == 1) {
    out.b_to_a = rel.front();
    return out;
  }
  std::vector<Quat> qs;
  Vec3 t = Vec3::Zero();
  for (const Pose& p : rel) {
    qs.push_back(p.rotation);
    t += p.translation;
  }
  out.b_to_a = Pose(average_rotation(qs), t / static_cast<double>(rel.size()));
  for (std::size_t i = 0; i < rel.size(); ++i) {
    for (std::size_t j = i + 1; j < rel.size(); ++j) {
      const PoseError e = pose_error(rel[i], rel[j]);
      out.max_rot_disagreement = std::max(out.max_rot_disagreement, e.rot_angle);
      out.max_trans_disagreement = std::max(out.max_trans_disagreement, e.trans_dist);
    }
  }
  return out;
}

DepthDeviation depth_deviation(const PointCloud& measured, const Vec3& normal, double d) {
  if (measured.empty()) throw Error(ErrorKind::EmptyCloud, "depth deviation needs a nonempty cloud");
  const double len = normal.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "plane normal must be nonzero");
  const Vec3 n = normal / len;
  const double dn = d / len;
  DepthDeviation out;
  double sum = 0.0, sq = 0.0;
  for (const Vec3& p : measured.points) {
    const double s = n.dot(p) - dn;
    sum += s;
    sq += s * s;
    out.max = std::max(out.max, std::abs(s));
  }
  const double count = static_cast<double>(measured.size());
  out.mean = sum / count;
  out.rms = std::sqrt(sq / count);
  return out;
}

}  // namespace pickplace
