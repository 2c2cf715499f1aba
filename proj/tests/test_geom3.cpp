#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/geom3.hpp"
#include "pickplace/rng.hpp"

using namespace pickplace;

namespace {

const Quat kRz90(std::cos(kPi / 4), 0.0, 0.0, std::sin(kPi / 4));

void expect_pose_near(const Pose& a, const Pose& b, double tol) {
  const PoseError e = pose_error(a, b);
  EXPECT_LE(e.rot_angle, tol);
  EXPECT_LE(e.trans_dist, tol);
}

}  // namespace

TEST(Geom3, ComposeWithIdentity) {
  Rng rng(1);
  const Pose p = oracle::random_pose(rng);
  expect_pose_near(compose(Pose::identity(), p), p, 1e-12);
  expect_pose_near(compose(p, Pose::identity()), p, 1e-12);
}

TEST(Geom3, ComposeHandComputed) {
  const Pose a(kRz90, Vec3(1, 0, 0));
  const Pose b = Pose::from_translation(Vec3(1, 0, 0));
  const Pose c = compose(a, b);
  EXPECT_NEAR(c.translation.x(), 1.0, 1e-12);
  EXPECT_NEAR(c.translation.y(), 1.0, 1e-12);
  EXPECT_NEAR(c.translation.z(), 0.0, 1e-12);
  EXPECT_LE(pose_error(c, Pose(kRz90, c.translation)).rot_angle, 1e-12);
}

TEST(Geom3, ComposeMatchesMatrixProduct) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Pose a = oracle::random_pose(rng), b = oracle::random_pose(rng);
    const Mat4 m = a.matrix() * b.matrix();
    EXPECT_LE((compose(a, b).matrix() - m).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Geom3, InvertCases) {
  expect_pose_near(invert(Pose::identity()), Pose::identity(), 0.0);
  const Pose inv = invert(Pose::from_translation(Vec3(1, 2, 3)));
  EXPECT_EQ(inv.translation, Vec3(-1, -2, -3));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Pose p = oracle::random_pose(rng, 5.0);
    expect_pose_near(compose(invert(p), p), Pose::identity(), 1e-9);
    expect_pose_near(compose(p, invert(p)), Pose::identity(), 1e-9);
  }
}

TEST(Geom3, Associativity) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Pose a = oracle::random_pose(rng), b = oracle::random_pose(rng), c = oracle::random_pose(rng);
    expect_pose_near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9);
  }
}

TEST(Geom3, TransformPoint) {
  EXPECT_EQ(transform_point(Pose::identity(), Vec3(1, 2, 3)), Vec3(1, 2, 3));
  EXPECT_LE((transform_point(Pose(kRz90, Vec3::Zero()), Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_EQ(transform_point(Pose::from_translation(Vec3(0, 0, 0.5)), Vec3::Zero()), Vec3(0, 0, 0.5));
}

TEST(Geom3, RodriguesExpClosedForm) {
  EXPECT_EQ(rodrigues_exp(Vec3::Zero()).coeffs(), Quat::Identity().coeffs());
  const Quat q = rodrigues_exp(Vec3(0, 0, kPi / 2));
  EXPECT_NEAR(q.w(), std::cos(kPi / 4), 1e-15);
  EXPECT_NEAR(q.z(), std::sin(kPi / 4), 1e-15);
  EXPECT_NEAR(q.x(), 0.0, 1e-15);
}

TEST(Geom3, RodriguesExpMatchesLonghandMatrix) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = rng.unit_vec3();
    const double angle = rng.uniform(0.0, kPi);
    const Mat3 want = oracle::axis_angle_matrix(axis, angle);
    EXPECT_LE((rodrigues_exp(axis * angle).toRotationMatrix() - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Geom3, RodriguesLog) {
  EXPECT_EQ(rodrigues_log(Quat::Identity()), Vec3::Zero());
  EXPECT_LE((rodrigues_log(kRz90) - Vec3(0, 0, kPi / 2)).norm(), 1e-12);
  const Quat near_pi = rodrigues_exp(Vec3(0, 0, deg2rad(179.99999)));
  try {
    rodrigues_log(near_pi);
    FAIL() << "expected AngleNearPi";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AngleNearPi);
  }
}

TEST(Geom3, RodriguesRoundtrip) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Quat q = rng.rotation();
    if (rotation_angle(q) >= kPi - 1e-6) continue;
    const Quat back = rodrigues_exp(rodrigues_log(q));
    EXPECT_LE(rotation_angle(back.conjugate() * q), 1e-9);
    // Small angles go through the series branch.
    const Vec3 tiny = rng.unit_vec3() * 1e-9;
    EXPECT_LE((rodrigues_log(rodrigues_exp(tiny)) - tiny).norm(), 1e-18);
  }
}

TEST(Geom3, PoseErrorCases) {
  Rng rng(7);
  const Pose p = oracle::random_pose(rng);
  EXPECT_EQ(pose_error(p, p).rot_angle, 0.0);
  EXPECT_EQ(pose_error(p, p).trans_dist, 0.0);
  const PoseError t = pose_error(Pose::identity(), Pose::from_translation(Vec3(0.1, 0, 0)));
  EXPECT_EQ(t.rot_angle, 0.0);
  EXPECT_NEAR(t.trans_dist, 0.1, 1e-15);
  EXPECT_NEAR(pose_error(Pose::identity(), Pose(kRz90, Vec3::Zero())).rot_angle, kPi / 2, 1e-12);
}

TEST(Geom3, QuaternionsCanonicalAndUnit) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Pose p = compose(oracle::random_pose(rng), oracle::random_pose(rng));
    EXPECT_NEAR(p.rotation.norm(), 1.0, 1e-9);
    EXPECT_GE(p.rotation.w(), 0.0);
    const Pose q = invert(p);
    EXPECT_GE(q.rotation.w(), 0.0);
  }
  const Quat neg(-0.5, 0.5, 0.5, 0.5);
  EXPECT_GE(canonical(neg).w(), 0.0);
}

TEST(Geom3, FrameIds) {
  EXPECT_EQ(FrameId::robot_base(), FrameId("robot_base"));
  EXPECT_FALSE(FrameId("Camera") == FrameId::camera());
  EXPECT_THROW(FrameId(""), Error);
}

TEST(Geom3, SkewIsCrossProduct) {
  Rng rng(9);
  const Vec3 a = rng.unit_vec3(), b = rng.unit_vec3();
  EXPECT_LE((skew(a) * b - a.cross(b)).norm(), 1e-15);
}
