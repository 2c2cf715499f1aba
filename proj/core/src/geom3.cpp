#include "pickplace/geom3.hpp"

#include <algorithm>
#include <cmath>

#include "pickplace/error.hpp"

namespace pickplace {

namespace {
constexpr double kNearPiMargin = 1e-6;
}

Quat canonical(const Quat& q) {
  Quat n = q.normalized();
  if (n.w() < 0.0) n.coeffs() = -n.coeffs();
  return n;
}

Pose::Pose(const Quat& q, const Vec3& t) : rotation(canonical(q)), translation(t) {}

Pose::Pose(const Mat3& r, const Vec3& t) : rotation(canonical(Quat(r))), translation(t) {}

Pose Pose::from_matrix(const Mat4& m) {
  return Pose(Mat3(m.topLeftCorner<3, 3>()), Vec3(m.topRightCorner<3, 1>()));
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::operator*(const Pose& other) const { return compose(*this, other); }

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

Pose invert(const Pose& p) {
  const Quat inv = p.rotation.conjugate();
  return Pose(inv, -(inv * p.translation));
}

Vec3 transform_point(const Pose& p, const Vec3& v) { return p.rotation * v + p.translation; }

Vec3 rotate_vector(const Pose& p, const Vec3& v) { return p.rotation * v; }

Quat rodrigues_exp(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Quat::Identity();
  const double half = 0.5 * angle;
  // sin(half)/angle is well conditioned for small angles via the series.
  const double k = angle < 1e-8 ? 0.5 - angle * angle / 48.0 : std::sin(half) / angle;
  return canonical(Quat(std::cos(half), k * axis_angle.x(), k * axis_angle.y(), k * axis_angle.z()));
}

double rotation_angle(const Quat& q) {
  const Quat c = canonical(q);
  const double s = c.vec().norm();
  return 2.0 * std::atan2(s, c.w());
}

Vec3 rodrigues_log(const Quat& q) {
  const Quat c = canonical(q);
  const double s = c.vec().norm();
  const double angle = 2.0 * std::atan2(s, c.w());
  if (angle >= kPi - kNearPiMargin) {
    throw Error(ErrorKind::AngleNearPi, "rotation angle " + std::to_string(angle) + " rad is at the branch cut");
  }
  if (s < 1e-12) {
    // angle ~ 2 s / w for tiny rotations
    return 2.0 * c.vec() / c.w();
  }
  return c.vec() * (angle / s);
}

PoseError pose_error(const Pose& a, const Pose& b) {
  return {rotation_angle(a.rotation.conjugate() * b.rotation), (a.translation - b.translation).norm()};
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

FrameId::FrameId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw Error(ErrorKind::InvalidArgument, "frame id must be nonempty");
}

}  // namespace pickplace
