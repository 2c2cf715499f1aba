#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/handeye.hpp"
#include "pickplace/sim.hpp"

using namespace pickplace;

namespace {

HandEyeScene scene() {
  return {look_at(Vec3(1.1, -0.45, 0.65), Vec3(0.5, 0, 0)),
          Pose(rodrigues_exp(Vec3(0, 0, deg2rad(30))), Vec3(0, 0, 0.08))};
}

}  // namespace

TEST(HandEye, NoiseFreeRecoversBothUnknowns) {
  const HandEyeScene s = scene();
  for (bool all : {false, true}) {
    const HandEyeResult r = calibrate_eye_to_hand(synth_stations(s, 15, 61), HandEyeOptions{.all_pairs = all});
    EXPECT_LE(pose_error(r.base_to_camera, s.base_to_camera).rot_angle, 1e-6);
    EXPECT_LE(pose_error(r.base_to_camera, s.base_to_camera).trans_dist, 1e-6);
    EXPECT_LE(pose_error(r.ee_to_marker, s.ee_to_marker).trans_dist, 1e-6);
    EXPECT_LE(r.rot_residual, 1e-6);
  }
}

TEST(HandEye, RefinementDoesNotHurtNoiseFree) {
  const HandEyeScene s = scene();
  const HandEyeResult r = calibrate_eye_to_hand(synth_stations(s, 15, 62), HandEyeOptions{.refine = true});
  EXPECT_LE(pose_error(r.base_to_camera, s.base_to_camera).trans_dist, 1e-6);
}

TEST(HandEye, RelativeMotionCounts) {
  const auto st = synth_stations(scene(), 6, 63);
  EXPECT_EQ(relative_motions(st).size(), 5u);
  EXPECT_EQ(relative_motions(st, true).size(), 15u);
  try {
    relative_motions({st[0], st[1]});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewSamples);
  }
}

TEST(HandEye, SolveAxXbOnConstructedPairs) {
  Rng rng(64);
  const Pose x = oracle::random_pose(rng);
  std::vector<MotionPair> pairs;
  for (int i = 0; i < 6; ++i) {
    const Pose b(rng.rotation_within(deg2rad(60)), rng.translation_within(0.2));
    pairs.push_back({compose(compose(x, b), invert(x)), b});
  }
  const AxXbSolution sol = solve_ax_xb(pairs);
  EXPECT_LE(pose_error(sol.x, x).rot_angle, 1e-9);
  EXPECT_LE(pose_error(sol.x, x).trans_dist, 1e-9);
  pairs.resize(1);
  try {
    solve_ax_xb(pairs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewPairs);
  }
}

TEST(HandEye, SingleAxisMotionsAreDegenerate) {
  Rng rng(65);
  const Pose x = oracle::random_pose(rng);
  const Vec3 axis = rng.unit_vec3();
  std::vector<MotionPair> pairs;
  for (int i = 0; i < 6; ++i) {
    const Pose b(rodrigues_exp(axis * rng.uniform(0.2, 1.0)), rng.translation_within(0.2));
    pairs.push_back({compose(compose(x, b), invert(x)), b});
  }
  try {
    solve_ax_xb(pairs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateMotions);
  }
}

TEST(Marker, PnpNoiseFree) {
  CameraIntrinsics k;
  k.fx = k.fy = 900;
  k.cx = 640;
  k.cy = 360;
  const MarkerSpec spec{0.15};
  const Pose cam_to_marker(rodrigues_exp(Vec3(2.8, 0.3, 0.1)), Vec3(0.05, -0.02, 0.7));
  std::array<Vec2, 4> px;
  const auto corners = spec.corners();
  for (int i = 0; i < 4; ++i) px[i] = project(k, cam_to_marker * corners[i]);
  const MarkerPose mp = marker_pnp(k, spec, px);
  EXPECT_LE(pose_error(mp.cam_to_marker, cam_to_marker).rot_angle, 1e-8);
  EXPECT_LE(pose_error(mp.cam_to_marker, cam_to_marker).trans_dist, 1e-8);
  EXPECT_LE(mp.rms_px, 1e-6);
  std::array<Vec2, 4> line{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)};
  EXPECT_THROW(marker_pnp(k, spec, line), Error);
}

TEST(Marker, CornersCounterClockwiseFromTopLeft) {
  const auto c = MarkerSpec{0.2}.corners();
  EXPECT_EQ(c[0], Vec3(-0.1, 0.1, 0));
  EXPECT_EQ(c[1], Vec3(-0.1, -0.1, 0));
  EXPECT_EQ(c[2], Vec3(0.1, -0.1, 0));
  EXPECT_EQ(c[3], Vec3(0.1, 0.1, 0));
}
