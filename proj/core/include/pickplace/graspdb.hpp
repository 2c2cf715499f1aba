#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pickplace/cloud.hpp"
#include "pickplace/geom3.hpp"
#include "pickplace/register.hpp"

namespace pickplace {

enum class GripperType { TwoFinger, ThreeFinger };

std::string to_string(GripperType g);
GripperType gripper_from_string(const std::string& s);

// One taught view: the segmented cloud and the demonstrated grasp, both in robot_base.
struct FaceRecord {
  std::string face_id;
  PointCloud cloud;
  Pose grasp;  // robot_base -> gripper at grasp
  GripperType gripper = GripperType::TwoFinger;
  std::string created_at;  // ISO-8601 UTC
};

struct ObjectModel {
  std::string object_id;
  std::vector<FaceRecord> faces;
};

struct MatchResult {
  std::string object_id;
  std::string face_id;
  AlignmentResult alignment;
  Pose grasp_in_scene;
};

inline constexpr int kGraspDbSchemaVersion = 1;

// In-memory teaching store. Single writer; matching only reads.
class GraspDb {
 public:
  /// Appends a face; the id is `<object_id>_<ordinal>`. Throws WrongFrame or EmptyCloud.
  std::string register_face(const std::string& object_id, const PointCloud& cloud, const Pose& grasp,
                            GripperType gripper, const std::string& created_at = current_timestamp());

  bool empty() const { return objects_.empty(); }
  const std::map<std::string, ObjectModel>& objects() const { return objects_; }
  const ObjectModel* find(const std::string& object_id) const;

  static std::string current_timestamp();

 private:
  friend GraspDb load_db(const std::filesystem::path& dir);
  std::map<std::string, ObjectModel> objects_;
};

/// Aligns every face against `scanned` and keeps the best by fitness, then
/// lower rmse, then face id. Throws NoMatch below `accept_threshold`.
MatchResult match_object(const GraspDb& db, const PointCloud& scanned, const IcpParams& params,
                         double accept_threshold);

/// Grasp following the object's rigid motion: alignment * registered_grasp.
Pose transfer_grasp(const Pose& alignment, const Pose& registered_grasp);

/// Layout: `<dir>/<object_id>/manifest.json` and `face_<n>.ply` per face.
/// Files are written to a temporary name and renamed into place.
void save_db(const GraspDb& db, const std::filesystem::path& dir);

/// Throws ParseError, MissingSidecar, SchemaVersionMismatch, or IoError.
GraspDb load_db(const std::filesystem::path& dir);

}  // namespace pickplace
