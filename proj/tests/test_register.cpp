#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/register.hpp"
#include "pickplace/sim.hpp"

using namespace pickplace;

namespace {

PointCloud box_view(std::uint64_t seed, double noise, const Pose& object_pose) {
  const ShapeSpec box{ShapeKind::Box, {0.12, 0.08, 0.04}, 2e5};
  const PointCloud model = synth_cloud(box, seed);
  return simulate_view(model, ViewSpec{object_pose, look_at(Vec3(0.6, -0.4, 0.5), Vec3::Zero()), noise,
                                       Visibility::CameraFacing, seed + 1});
}

}  // namespace

TEST(Umeyama, RecoversExactTransform) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose t = oracle::random_pose(rng);
    const auto src = oracle::random_points(rng, 10);
    std::vector<Vec3> dst;
    for (const Vec3& p : src) dst.push_back(t * p);
    const PoseError e = pose_error(umeyama_fit(src, dst), t);
    EXPECT_LE(e.rot_angle, 1e-9);
    EXPECT_LE(e.trans_dist, 1e-9);
  }
}

TEST(Umeyama, NeverReturnsReflection) {
  // Mirrored correspondences have a better reflection fit; the result must stay proper.
  Rng rng(42);
  const auto src = oracle::random_points(rng, 20);
  std::vector<Vec3> dst;
  for (const Vec3& p : src) dst.emplace_back(-p.x(), p.y(), p.z());
  const Pose t = umeyama_fit(src, dst);
  EXPECT_NEAR(t.rotation_matrix().determinant(), 1.0, 1e-12);
}

TEST(Umeyama, Errors) {
  const std::vector<Vec3> three{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  const std::vector<Vec3> two{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  try {
    umeyama_fit(three, two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  try {
    umeyama_fit(line, line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }
}

TEST(Icp, IdentityOnSameCloud) {
  const PointCloud c = box_view(1, 0.0, Pose::identity());
  const AlignmentResult r = icp(c, c, Pose::identity(), IcpParams{});
  EXPECT_LE(pose_error(r.transform, Pose::identity()).trans_dist, 1e-12);
  EXPECT_DOUBLE_EQ(r.fitness, 1.0);
  EXPECT_TRUE(r.converged);
}

TEST(Icp, RecoversSmallOffsetBothVariants) {
  Rng rng(43);
  const PointCloud target = box_view(2, 0.0, Pose::identity());
  const Pose offset(rng.rotation_within(deg2rad(8)), rng.translation_within(0.01));
  const PointCloud source = transformed(target, invert(offset));
  for (IcpVariant v : {IcpVariant::PointToPoint, IcpVariant::PointToPlane}) {
    const AlignmentResult r = icp(source, target, Pose::identity(), IcpParams{100, 0.05, 1e-9, v});
    const PoseError e = pose_error(r.transform, offset);
    EXPECT_LE(rad2deg(e.rot_angle), 0.05);
    EXPECT_LE(e.trans_dist, 1e-4);
  }
}

TEST(Icp, RmseHistoryNeverIncreases) {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud target = box_view(10 + trial, 0.001, Pose::identity());
    const Pose offset(rng.rotation_within(deg2rad(15)), rng.translation_within(0.03));
    const PointCloud source = transformed(box_view(100 + trial, 0.001, Pose::identity()), invert(offset));
    const AlignmentResult r = icp(source, target, Pose::identity(), IcpParams{60, 0.05, 1e-7});
    ASSERT_FALSE(r.rmse_history.empty());
    for (std::size_t i = 1; i < r.rmse_history.size(); ++i) EXPECT_LE(r.rmse_history[i], r.rmse_history[i - 1]);
  }
}

TEST(Icp, Errors) {
  const PointCloud c = box_view(3, 0.0, Pose::identity());
  try {
    icp(c, c, Pose::from_translation(Vec3(5, 0, 0)), IcpParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCorrespondences);
  }
  PointCloud bare = c;
  bare.normals.clear();
  try {
    icp(c, bare, Pose::identity(), IcpParams{60, 0.02, 1e-6, IcpVariant::PointToPlane});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingNormals);
  }
  EXPECT_THROW(IcpParams({0, 0.02, 1e-6}).validate(), Error);
  EXPECT_THROW(IcpParams({10, -1.0, 1e-6}).validate(), Error);
}

TEST(CoarseAlign, OneHypothesisRecoversPrincipalAlignment) {
  Rng rng(45);
  const PointCloud a = box_view(4, 0.0, Pose::identity());
  const Pose t(rng.rotation(), Vec3(0.3, -0.2, 0.1));
  const PointCloud b = transformed(a, t);
  const auto hyps = coarse_align_pca(a, b);
  ASSERT_EQ(hyps.size(), 4u);
  double best = 1e9;
  for (const Pose& h : hyps) {
    EXPECT_NEAR(h.rotation_matrix().determinant(), 1.0, 1e-12);
    best = std::min(best, pose_error(h, t).rot_angle);
  }
  EXPECT_LE(best, 1e-6);
}

TEST(AlignObject, RecoversLargeRotation) {
  Rng rng(46);
  const PointCloud a = box_view(5, 0.0, Pose::identity());
  const Pose t(rng.rotation_within(deg2rad(120)), Vec3(0.2, 0.1, 0.0));
  const AlignmentResult r = align_object(a, transformed(a, t), IcpParams{60, 0.01, 1e-7});
  EXPECT_GE(r.fitness, 0.999);
  EXPECT_LE(r.inlier_rmse, 1e-6);
}

TEST(Fitness, CountsGatedSourcePoints) {
  PointCloud src, dst;
  src.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(5, 0, 0), Vec3(9, 0, 0)};
  dst.points = {Vec3(0, 0, 0.001), Vec3(1, 0, 0)};
  const FitnessScore f = compute_fitness(src, dst, Pose::identity(), 0.01);
  EXPECT_DOUBLE_EQ(f.fitness, 0.5);
  EXPECT_NEAR(f.inlier_rmse, std::sqrt(0.5 * 1e-6), 1e-12);
  EXPECT_DOUBLE_EQ(compute_fitness(src, PointCloud{}, Pose::identity(), 0.01).fitness, 0.0);
  EXPECT_THROW(compute_fitness(src, dst, Pose::identity(), 0.0), Error);
}
