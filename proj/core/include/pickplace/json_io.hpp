#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

#include "pickplace/calib.hpp"
#include "pickplace/geom3.hpp"
#include "pickplace/handeye.hpp"
#include "pickplace/register.hpp"

namespace pickplace {

using Json = nlohmann::json;

// Pose wire format: {"q": [w, x, y, z], "t": [x, y, z]}. Doubles are written
// in shortest round-trip form, so a save/load cycle is bit exact.
Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j);

Json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);

Json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const Json& j);

Json icp_params_to_json(const IcpParams& p);
/// Missing keys keep their defaults.
IcpParams icp_params_from_json(const Json& j);

Json alignment_to_json(const AlignmentResult& r);
Json hand_eye_to_json(const HandEyeResult& r);

/// Correspondence file: a list of {"object": [[x,y,0],...], "image": [[u,v],...]},
/// or {"board": {cols, rows, square_size_m}, "views": [{"image": [...]}, ...]}.
std::vector<PlanarView> views_from_json(const Json& j);
Json views_to_json(const std::vector<PlanarView>& views);

/// Station file: a list of {"base_to_ee": Pose, "cam_to_marker": Pose}.
std::vector<StationSample> stations_from_json(const Json& j);
Json stations_to_json(const std::vector<StationSample>& stations);

/// Throws IoError / ParseError.
Json read_json_file(const std::filesystem::path& path);
/// Writes `dump(2)` plus a trailing newline through a temp file and rename.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace pickplace
