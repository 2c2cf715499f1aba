#include "pickplace/plan.hpp"

#include <cmath>

#include "pickplace/error.hpp"

namespace pickplace {

std::string to_string(GripperAction a) {
  switch (a) {
    case GripperAction::None: return "none";
    case GripperAction::Open: return "open";
    case GripperAction::Close: return "close";
  }
  return "none";
}

const Waypoint& PickPlacePlan::at(const std::string& label) const {
  for (const Waypoint& w : waypoints) {
    if (w.label == label) return w;
  }
  throw Error(ErrorKind::InvalidArgument, "plan has no waypoint '" + label + "'");
}

double PickPlacePlan::transit_length() const {
  return (at("transit").pose.translation - at("lift").pose.translation).norm();
}

PickPlacePlan plan_pick_place(const Pose& grasp_in_scene, const Pose& place_pose, double approach_offset) {
  if (!(approach_offset > 0.0) || !std::isfinite(approach_offset)) {
    throw Error(ErrorKind::InvalidArgument, "approach offset must be positive");
  }
  const Pose back_off = Pose::from_translation(Vec3(0.0, 0.0, -approach_offset));
  const Vec3 up(0.0, 0.0, approach_offset);
  const auto raised = [&](const Pose& p) { return Pose(p.rotation, p.translation + up); };

  PickPlacePlan plan;
  plan.waypoints = {
      {"approach", compose(grasp_in_scene, back_off), GripperAction::Open},
      {"grasp", grasp_in_scene, GripperAction::Close},
      {"lift", raised(grasp_in_scene), GripperAction::None},
      {"transit", raised(place_pose), GripperAction::None},
      {"place_approach", compose(place_pose, back_off), GripperAction::None},
      {"place", place_pose, GripperAction::Open},
      {"retreat", compose(place_pose, back_off), GripperAction::None},
  };
  for (const Waypoint& w : plan.waypoints) {
    if (!w.pose.translation.allFinite() || !w.pose.rotation.coeffs().allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "non-finite waypoint '" + w.label + "'");
    }
  }
  return plan;
}

}  // namespace pickplace
