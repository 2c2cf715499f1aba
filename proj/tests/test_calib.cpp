#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/calib.hpp"
#include "pickplace/error.hpp"
#include "pickplace/sim.hpp"

using namespace pickplace;

namespace {

CameraIntrinsics truth_camera(bool distorted) {
  CameraIntrinsics k;
  k.fx = 900;
  k.fy = 880;
  k.cx = 640;
  k.cy = 360;
  if (distorted) {
    k.k1 = -0.05;
    k.k2 = 0.01;
  }
  return k;
}

std::vector<PlanarView> make_views(const CameraIntrinsics& k, int n, double noise, std::uint64_t seed) {
  const BoardSpec board;
  std::vector<PlanarView> views;
  const auto poses = synth_board_poses(board, n, 0.6, seed);
  for (std::size_t i = 0; i < poses.size(); ++i)
    views.push_back(synth_planar_view(k, board, poses[i], noise, mix_seed(seed, 100 + i)));
  return views;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Camera, ProjectUnprojectRoundtrip) {
  const CameraIntrinsics k = truth_camera(true);
  Rng rng(51);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(0.4, 1.0));
    const Vec3 back = unproject(k, project(k, p), p.z());
    EXPECT_LE((back - p).norm(), 1e-9);
  }
  const Vec2 c = project(truth_camera(false), Vec3(0, 0, 1));
  EXPECT_EQ(c, Vec2(640, 360));
  try {
    project(k, Vec3(0, 0, -1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BehindCamera);
  }
}

TEST(Homography, ExactOnNoiseFreeView) {
  const auto views = make_views(truth_camera(false), 1, 0.0, 52);
  const Homography h = estimate_homography(views[0]);
  for (std::size_t i = 0; i < views[0].object_points.size(); ++i) {
    const Vec3& o = views[0].object_points[i];
    EXPECT_LE((h.apply(Vec2(o.x(), o.y())) - views[0].image_points[i]).norm(), 1e-8);
  }
}

TEST(Homography, RejectsDegenerateInput) {
  PlanarView v;
  v.object_points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  v.image_points = {Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)};
  try {
    estimate_homography(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateConfiguration);
  }
  v.object_points.resize(3);
  v.image_points.resize(3);
  EXPECT_THROW(estimate_homography(v), Error);
}

TEST(Zhang, ClosedFormOnNoiseFreeViews) {
  const CameraIntrinsics k = truth_camera(false);
  std::vector<Homography> hs;
  for (const auto& v : make_views(k, 6, 0.0, 53)) hs.push_back(estimate_homography(v));
  const CameraIntrinsics got = zhang_intrinsics(hs);
  EXPECT_LE(rel(got.fx, k.fx), 1e-6);
  EXPECT_LE(rel(got.fy, k.fy), 1e-6);
  EXPECT_LE(rel(got.cx, k.cx), 1e-6);
  EXPECT_LE(rel(got.cy, k.cy), 1e-6);
  hs.resize(2);
  try {
    zhang_intrinsics(hs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientViews);
  }
}

TEST(Zhang, CalibrateWithDistortionNoiseFree) {
  const CameraIntrinsics k = truth_camera(true);
  const CalibrationResult r = calibrate_camera(make_views(k, 10, 0.0, 54));
  EXPECT_LE(rel(r.intrinsics.fx, k.fx), 1e-6);
  EXPECT_LE(rel(r.intrinsics.cy, k.cy), 1e-6);
  EXPECT_NEAR(r.intrinsics.k1, k.k1, 1e-6);
  EXPECT_LE(r.rms_px, 1e-6);
  EXPECT_LE(r.rms_px, r.initial_rms_px);
}

TEST(Zhang, NoisyRmsNearPixelSigma) {
  const CameraIntrinsics k = truth_camera(true);
  const CalibrationResult r = calibrate_camera(make_views(k, 10, 0.2, 55));
  EXPECT_GT(r.rms_px, 0.15);
  EXPECT_LT(r.rms_px, 0.25);
  EXPECT_LE(rel(r.intrinsics.fx, k.fx), 0.01);
}

TEST(Extrinsics, FromHomographyMatchesTruth) {
  const CameraIntrinsics k = truth_camera(false);
  const BoardSpec board;
  const auto poses = synth_board_poses(board, 3, 0.6, 56);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const PlanarView v = synth_planar_view(k, board, poses[i], 0.0, i);
    const PoseError e = pose_error(extrinsics_from_homography(k, estimate_homography(v)), poses[i]);
    EXPECT_LE(e.rot_angle, 1e-7);
    EXPECT_LE(e.trans_dist, 1e-7);
  }
}

TEST(Stereo, AveragesConsistentPairs) {
  Rng rng(57);
  const Pose b_to_a = oracle::random_pose(rng, 0.3);
  std::vector<std::pair<Pose, Pose>> pairs;
  for (int i = 0; i < 5; ++i) {
    const Pose board_to_b = oracle::random_pose(rng);
    pairs.emplace_back(compose(b_to_a, board_to_b), board_to_b);
  }
  const StereoResult s = stereo_extrinsic(pairs);
  EXPECT_LE(pose_error(s.b_to_a, b_to_a).rot_angle, 1e-12);
  EXPECT_LE(s.max_trans_disagreement, 1e-12);
  try {
    stereo_extrinsic({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(AverageRotation, SignInvariant) {
  const Quat q = rodrigues_exp(Vec3(0.1, 0.2, 0.3));
  const Quat neg(-q.w(), -q.x(), -q.y(), -q.z());
  EXPECT_LE(rotation_angle(average_rotation({q, neg, q}).conjugate() * q), 1e-12);
}

TEST(DepthDeviation, SignedMeanAndMax) {
  PointCloud c;
  c.points = {Vec3(0, 0, 0.004), Vec3(1, 0, 0.002), Vec3(0, 1, -0.003)};
  const DepthDeviation d = depth_deviation(c, Vec3::UnitZ(), 0.0);
  EXPECT_NEAR(d.mean, 0.001, 1e-15);
  EXPECT_NEAR(d.max, 0.004, 1e-15);
  EXPECT_NEAR(d.rms, std::sqrt((16 + 4 + 9) / 3.0) * 1e-3, 1e-15);
}
