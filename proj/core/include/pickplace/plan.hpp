#pragma once

#include <string>
#include <vector>

#include "pickplace/geom3.hpp"

namespace pickplace {

enum class GripperAction { None, Open, Close };

std::string to_string(GripperAction a);

struct Waypoint {
  std::string label;
  Pose pose;  // robot_base -> gripper
  GripperAction action = GripperAction::None;
};

// Labels in order: approach, grasp, lift, transit, place_approach, place, retreat.
struct PickPlacePlan {
  std::vector<Waypoint> waypoints;

  const Waypoint& at(const std::string& label) const;  // throws InvalidArgument
  double transit_length() const;  // lift -> transit
};

/// Purely kinematic plan. Approach and retreat back off along the gripper -z
/// axis; lift and transit move along robot_base +z.
PickPlacePlan plan_pick_place(const Pose& grasp_in_scene, const Pose& place_pose, double approach_offset = 0.1);

}  // namespace pickplace
