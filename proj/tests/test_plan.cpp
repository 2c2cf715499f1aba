#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/plan.hpp"

using namespace pickplace;

namespace {

const std::vector<std::string> kLabels{"approach", "grasp", "lift", "transit", "place_approach", "place", "retreat"};

}  // namespace

TEST(Plan, LabelsAndActionsInOrder) {
  Rng rng(101);
  const PickPlacePlan p = plan_pick_place(oracle::random_pose(rng), oracle::random_pose(rng));
  ASSERT_EQ(p.waypoints.size(), kLabels.size());
  for (std::size_t i = 0; i < kLabels.size(); ++i) EXPECT_EQ(p.waypoints[i].label, kLabels[i]);
  EXPECT_EQ(p.at("approach").action, GripperAction::Open);
  EXPECT_EQ(p.at("grasp").action, GripperAction::Close);
  EXPECT_EQ(p.at("place").action, GripperAction::Open);
  EXPECT_EQ(p.at("transit").action, GripperAction::None);
  EXPECT_THROW(p.at("dance"), Error);
}

TEST(Plan, ApproachBacksOffAlongGripperZ) {
  const Pose grasp(rodrigues_exp(Vec3(kPi, 0, 0) * 0.999999), Vec3(0.5, 0, 0.02));
  const PickPlacePlan p = plan_pick_place(grasp, Pose::from_translation(Vec3(0.3, 0.4, 0.1)), 0.1);
  const Vec3 back = p.at("approach").pose.translation - grasp.translation;
  EXPECT_NEAR(back.norm(), 0.1, 1e-12);
  EXPECT_NEAR(back.dot(grasp.rotation * Vec3::UnitZ()), -0.1, 1e-12);
  EXPECT_NEAR(p.at("lift").pose.translation.z(), 0.12, 1e-12);
  EXPECT_NEAR(p.at("transit").pose.translation.z(), 0.2, 1e-12);
  EXPECT_EQ(p.at("grasp").pose.translation, grasp.translation);
}

TEST(Plan, ApproachFartherFromObjectThanGrasp) {
  Rng rng(102);
  for (int i = 0; i < 50; ++i) {
    const Vec3 object = rng.normal_vec3(0.3);
    const Pose grasp(rng.rotation(), object + rng.translation_within(0.02));
    const PickPlacePlan p = plan_pick_place(grasp, oracle::random_pose(rng), 0.1);
    EXPECT_GT((p.at("approach").pose.translation - object).norm(), (grasp.translation - object).norm());
  }
}

TEST(Plan, PlaceEqualsGraspIsDegenerateButValid) {
  const Pose g = Pose::from_translation(Vec3(0.4, 0, 0.1));
  const PickPlacePlan p = plan_pick_place(g, g);
  EXPECT_DOUBLE_EQ(p.transit_length(), 0.0);
  EXPECT_EQ(p.waypoints.size(), 7u);
}

TEST(Plan, RejectsBadOffset) {
  try {
    plan_pick_place(Pose::identity(), Pose::identity(), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}
