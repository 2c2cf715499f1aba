#include "pickplace/graspdb.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>

#include "pickplace/error.hpp"
#include "pickplace/json_io.hpp"
#include "pickplace/ply.hpp"

namespace fs = std::filesystem;

namespace pickplace {

std::string to_string(GripperType g) { return g == GripperType::TwoFinger ? "two_finger" : "three_finger"; }

GripperType gripper_from_string(const std::string& s) {
  if (s == "two_finger") return GripperType::TwoFinger;
  if (s == "three_finger") return GripperType::ThreeFinger;
  throw Error(ErrorKind::ParseError, "unknown gripper type '" + s + "'");
}

std::string GraspDb::current_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string GraspDb::register_face(const std::string& object_id, const PointCloud& cloud, const Pose& grasp,
                                   GripperType gripper, const std::string& created_at) {
  if (object_id.empty()) throw Error(ErrorKind::InvalidArgument, "object id must be nonempty");
  if (cloud.frame != FrameId::robot_base()) {
    throw Error(ErrorKind::WrongFrame, "face cloud is in frame '" + cloud.frame.name() + "', expected robot_base");
  }
  if (cloud.empty()) throw Error(ErrorKind::EmptyCloud, "face cloud is empty");
  cloud.validate();

  ObjectModel& model = objects_[object_id];
  model.object_id = object_id;
  const std::string face_id = object_id + "_" + std::to_string(model.faces.size());
  model.faces.push_back(FaceRecord{face_id, cloud, grasp, gripper, created_at});
  return face_id;
}

const ObjectModel* GraspDb::find(const std::string& object_id) const {
  const auto it = objects_.find(object_id);
  return it == objects_.end() ? nullptr : &it->second;
}

Pose transfer_grasp(const Pose& alignment, const Pose& registered_grasp) {
  return compose(alignment, registered_grasp);
}

MatchResult match_object(const GraspDb& db, const PointCloud& scanned, const IcpParams& params,
                         double accept_threshold) {
  if (db.empty()) throw Error(ErrorKind::NoMatch, "grasp database is empty");
  if (scanned.frame != FrameId::robot_base()) {
    throw Error(ErrorKind::WrongFrame, "scanned cloud is in frame '" + scanned.frame.name() + "', expected robot_base");
  }

  std::optional<MatchResult> best;
  for (const auto& [object_id, model] : db.objects()) {
    for (const FaceRecord& face : model.faces) {
      AlignmentResult r;
      try {
        r = align_object(face.cloud, scanned, params);
      } catch (const Error&) {
        continue;
      }
      const bool better = !best || r.fitness > best->alignment.fitness ||
                          (r.fitness == best->alignment.fitness &&
                           (r.inlier_rmse < best->alignment.inlier_rmse ||
                            (r.inlier_rmse == best->alignment.inlier_rmse && face.face_id < best->face_id)));
      if (better) best = MatchResult{object_id, face.face_id, r, transfer_grasp(r.transform, face.grasp)};
    }
  }
  if (!best) throw Error(ErrorKind::NoMatch, "no face could be aligned to the scanned cloud");
  if (best->alignment.fitness < accept_threshold) {
    throw Error(ErrorKind::NoMatch, "best candidate " + best->face_id + " has fitness " +
                                        std::to_string(best->alignment.fitness) + " < " +
                                        std::to_string(accept_threshold));
  }
  return *best;
}

void save_db(const GraspDb& db, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  for (const auto& [object_id, model] : db.objects()) {
    const fs::path obj_dir = dir / object_id;
    fs::create_directories(obj_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + obj_dir.string() + ": " + ec.message());

    Json faces = Json::array();
    for (std::size_t i = 0; i < model.faces.size(); ++i) {
      const FaceRecord& f = model.faces[i];
      const std::string file = "face_" + std::to_string(i) + ".ply";
      const fs::path tmp = obj_dir / (file + ".tmp");
      save_ply(f.cloud, tmp);
      fs::rename(tmp, obj_dir / file, ec);
      if (ec) throw Error(ErrorKind::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
      faces.push_back(Json{{"face_id", f.face_id},
                           {"cloud", file},
                           {"point_count", f.cloud.size()},
                           {"grasp", pose_to_json(f.grasp)},
                           {"gripper", to_string(f.gripper)},
                           {"created_at", f.created_at}});
    }
    // The manifest goes last so a reader never sees it before its sidecars.
    write_json_file(obj_dir / "manifest.json",
                    Json{{"schema_version", kGraspDbSchemaVersion}, {"object_id", object_id}, {"faces", faces}});
  }
}

GraspDb load_db(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, dir.string() + " is not a directory");

  std::vector<fs::path> object_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) object_dirs.push_back(entry.path());
  }
  std::sort(object_dirs.begin(), object_dirs.end());

  GraspDb db;
  for (const fs::path& obj_dir : object_dirs) {
    const fs::path manifest_path = obj_dir / "manifest.json";
    const Json manifest = read_json_file(manifest_path);
    try {
      const int version = manifest.at("schema_version").get<int>();
      if (version != kGraspDbSchemaVersion) {
        throw Error(ErrorKind::SchemaVersionMismatch, manifest_path.string() + " has schema_version " +
                                                          std::to_string(version) + ", expected " +
                                                          std::to_string(kGraspDbSchemaVersion));
      }
      ObjectModel model;
      model.object_id = manifest.at("object_id").get<std::string>();
      if (model.object_id.empty()) throw Error(ErrorKind::ParseError, manifest_path.string() + ": empty object_id");
      std::set<std::string> ids;
      for (const Json& jf : manifest.at("faces")) {
        FaceRecord f;
        f.face_id = jf.at("face_id").get<std::string>();
        if (!ids.insert(f.face_id).second) {
          throw Error(ErrorKind::ParseError, manifest_path.string() + ": duplicate face id " + f.face_id);
        }
        const fs::path ply = obj_dir / jf.at("cloud").get<std::string>();
        if (!fs::exists(ply)) {
          throw Error(ErrorKind::MissingSidecar, "face " + f.face_id + " references missing file " + ply.string());
        }
        f.cloud = load_ply(ply);
        if (f.cloud.empty()) throw Error(ErrorKind::ParseError, ply.string() + ": face cloud is empty");
        if (f.cloud.frame != FrameId::robot_base()) {
          throw Error(ErrorKind::ParseError, ply.string() + ": face cloud is not in robot_base");
        }
        if (jf.contains("point_count") && jf.at("point_count").get<std::size_t>() != f.cloud.size()) {
          throw Error(ErrorKind::ParseError, ply.string() + ": point count differs from manifest");
        }
        f.grasp = pose_from_json(jf.at("grasp"));
        f.gripper = gripper_from_string(jf.at("gripper").get<std::string>());
        f.created_at = jf.value("created_at", std::string());
        model.faces.push_back(std::move(f));
      }
      db.objects_[model.object_id] = std::move(model);
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::ParseError, manifest_path.string() + ": " + e.what());
    }
  }
  return db;
}

}  // namespace pickplace
