#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/kdtree.hpp"

using namespace pickplace;

TEST(KdTree, EmptyThrows) {
  const KdTree t;
  try {
    t.nearest(Vec3::Zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyTree);
  }
}

TEST(KdTree, SinglePoint) {
  const std::vector<Vec3> pts{Vec3(1, 2, 3)};
  const KdTree t(pts);
  const Neighbor n = t.nearest(Vec3(1, 2, 4));
  EXPECT_EQ(n.index, 0u);
  EXPECT_DOUBLE_EQ(n.distance, 1.0);
}

TEST(KdTree, DuplicatesResolveToLowestIndex) {
  std::vector<Vec3> pts(50, Vec3(0.5, 0.5, 0.5));
  pts.push_back(Vec3(2, 2, 2));
  const KdTree t(pts);
  EXPECT_EQ(t.nearest(Vec3(0.5, 0.5, 0.6)).index, 0u);
  const auto k = t.knn(Vec3(0.5, 0.5, 0.5), 5);
  ASSERT_EQ(k.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(k[i].index, i);
}

TEST(KdTree, NearestEqualsExhaustiveScan) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const auto pts = oracle::random_points(rng, 2000);
    const KdTree t(pts);
    for (int q = 0; q < 500; ++q) {
      const Vec3 query = rng.normal_vec3(0.8);
      const Neighbor want = oracle::nearest(pts, query);
      const Neighbor got = t.nearest(query);
      ASSERT_EQ(got.index, want.index);
      ASSERT_EQ(got.distance, want.distance);
    }
  }
}

TEST(KdTree, GridTiesMatchScan) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) pts.emplace_back(i, j, k);
  const KdTree t(pts);
  Rng rng(21);
  for (int q = 0; q < 300; ++q) {
    // Half-integer queries sit exactly between grid points.
    const Vec3 query(std::floor(rng.uniform(0, 8)) + 0.5, std::floor(rng.uniform(0, 8)), std::floor(rng.uniform(0, 8)));
    ASSERT_EQ(t.nearest(query).index, oracle::nearest(pts, query).index);
  }
}

TEST(KdTree, KnnSortedAndComplete) {
  Rng rng(22);
  const auto pts = oracle::random_points(rng, 300);
  const KdTree t(pts);
  for (int q = 0; q < 50; ++q) {
    const Vec3 query = rng.normal_vec3(0.5);
    const auto got = t.knn(query, 10);
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < pts.size(); ++i) all.emplace_back((pts[i] - query).norm(), i);
    std::sort(all.begin(), all.end());
    ASSERT_EQ(got.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(got[i].index, all[i].second);
      EXPECT_DOUBLE_EQ(got[i].distance, all[i].first);
    }
  }
  EXPECT_EQ(t.knn(Vec3::Zero(), 1000).size(), pts.size());
  EXPECT_TRUE(t.knn(Vec3::Zero(), 0).empty());
}
