#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <string>
#include <utility>

namespace pickplace {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

// Convention used everywhere: a Pose maps points p' = R * p + t (column
// vectors). A pose named `a_to_b` maps coordinates expressed in frame `b`
// into frame `a`, so `base_to_ee * ee_to_marker == base_to_marker`.
// Frames are right-handed, lengths in meters, cameras look along +z.

/// Normalizes `q` and flips its sign so that w >= 0.
Quat canonical(const Quat& q);

struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t);
  Pose(const Mat3& r, const Vec3& t);

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return Pose(Quat::Identity(), t); }
  static Pose from_rotation(const Quat& q) { return Pose(q, Vec3::Zero()); }
  static Pose from_matrix(const Mat4& m);

  Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
  Mat4 matrix() const;

  Pose operator*(const Pose& other) const;
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
};

/// Result maps p to a(b(p)).
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);
Vec3 transform_point(const Pose& p, const Vec3& v);
Vec3 rotate_vector(const Pose& p, const Vec3& v);

/// Rotation of |v| radians about v / |v|.
Quat rodrigues_exp(const Vec3& axis_angle);

/// Principal-branch logarithm; throws ErrorKind::AngleNearPi when the
/// rotation angle is within 1e-6 of pi.
Vec3 rodrigues_log(const Quat& q);

/// Rotation angle of q in [0, pi].
double rotation_angle(const Quat& q);

struct PoseError {
  double rot_angle = 0.0;   // radians, [0, pi]
  double trans_dist = 0.0;  // meters
};

PoseError pose_error(const Pose& a, const Pose& b);

Mat3 skew(const Vec3& v);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Frame identifiers are compared case-sensitively and must be nonempty.
class FrameId {
 public:
  explicit FrameId(std::string name);

  const std::string& name() const { return name_; }
  bool operator==(const FrameId& other) const = default;

  static FrameId robot_base() { return FrameId("robot_base"); }
  static FrameId camera() { return FrameId("camera"); }
  static FrameId end_effector() { return FrameId("end_effector"); }
  static FrameId marker() { return FrameId("marker"); }
  static FrameId object() { return FrameId("object"); }

 private:
  std::string name_;
};

}  // namespace pickplace
