#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/pipeline.hpp"
#include "pickplace/toml_lite.hpp"

using namespace pickplace;

namespace {

PipelineConfig small_demo(std::uint64_t seed = 1) {
  PipelineConfig c = PipelineConfig::demo();
  c.seed = seed;
  c.scenes = 4;
  return c;
}

ErrorKind toml_error(const std::string& text) {
  try {
    parse_toml(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // sentinel: no error
}

}  // namespace

TEST(Toml, ParsesSubset) {
  const Json j = parse_toml(R"(
seed = 7  # trailing comment
name = "box \"one\""
path = 'C:\raw'
[camera.intrinsics]
fx = 9_00.5
flags = [true, false]
grid = [[1, 2],
        [3, 4]]
[scenes]
shape = { kind = "cylinder", dimensions = [0.03, 0.1] }
a.b = -1e-3
)");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["name"], "box \"one\"");
  EXPECT_EQ(j["path"], "C:\\raw");
  EXPECT_DOUBLE_EQ(j["camera"]["intrinsics"]["fx"].get<double>(), 900.5);
  EXPECT_EQ(j["camera"]["intrinsics"]["grid"][1][0], 3);
  EXPECT_EQ(j["scenes"]["shape"]["kind"], "cylinder");
  EXPECT_DOUBLE_EQ(j["scenes"]["a"]["b"].get<double>(), -1e-3);
}

TEST(Toml, RejectsUnsupportedAndMalformed) {
  EXPECT_EQ(toml_error("[[faces]]\n"), ErrorKind::ParseError);
  EXPECT_EQ(toml_error("a = \"\"\"x\"\"\"\n"), ErrorKind::ParseError);
  EXPECT_EQ(toml_error("a = 1\na = 2\n"), ErrorKind::ParseError);
  EXPECT_EQ(toml_error("a = inf\n"), ErrorKind::ParseError);
  EXPECT_EQ(toml_error("a = [1, 2\n"), ErrorKind::ParseError);
  EXPECT_EQ(toml_error("= 3\n"), ErrorKind::ParseError);
}

TEST(Config, JsonRoundtrip) {
  const PipelineConfig c = PipelineConfig::demo();
  const Json j = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
}

TEST(Config, MissingKeysKeepDefaultsAndUnknownKeysFail) {
  const PipelineConfig c = config_from_json(Json{{"seed", 9}, {"scenes", {{"count", 2}}}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.scenes, 2);
  EXPECT_EQ(c.faces, PipelineConfig::demo().faces);
  for (const Json& bad : {Json{{"sceens", {}}}, Json{{"scenes", {{"cuont", 1}}}}, Json{{"scenes", {{"count", -1}}}},
                          Json{{"object", {{"shape", {{"kind", "sphere"}}}}}}}) {
    try {
      config_from_json(bad);
      ADD_FAILURE() << bad.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError) << bad.dump();
    }
  }
}

TEST(Config, TomlAndJsonFilesAgree) {
  const auto dir = oracle::scratch_dir("pipeline_config");
  std::ofstream(dir / "c.toml") << "seed = 5\n[scenes]\ncount = 3\nyaw_range_deg = 90.0\n[matching.icp]\nvariant = "
                                   "\"point_to_point\"\n";
  std::ofstream(dir / "c.json")
      << R"({"seed": 5, "scenes": {"count": 3, "yaw_range_deg": 90.0}, "matching": {"icp": {"variant": "point_to_point"}}})";
  EXPECT_EQ(config_to_json(load_config(dir / "c.toml")), config_to_json(load_config(dir / "c.json")));
  EXPECT_THROW(load_config(dir / "missing.toml"), Error);
}

TEST(Pipeline, DemoRunSucceeds) {
  const PipelineRun run = run_pipeline(small_demo());
  const Json& r = run.report;
  EXPECT_EQ(run.exit_code, 0) << r["summary"].dump();
  EXPECT_EQ(r["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(r["calibration"]["status"], "ok");
  EXPECT_EQ(r["hand_eye"]["status"], "ok");
  EXPECT_EQ(r["registration"]["faces"].size(), 3u);
  ASSERT_EQ(r["scenes"].size(), 4u);
  for (const Json& s : r["scenes"]) {
    EXPECT_EQ(s["status"], "ok");
    EXPECT_EQ(s["plan"].size(), 7u);
    EXPECT_EQ(s["plan"][0]["label"], "approach");
  }
  EXPECT_EQ(r["summary"]["planned"], 4);
}

TEST(Pipeline, SameSeedIsByteIdentical) {
  EXPECT_EQ(run_pipeline(small_demo(3)).report.dump(2), run_pipeline(small_demo(3)).report.dump(2));
  EXPECT_NE(run_pipeline(small_demo(3)).report.dump(), run_pipeline(small_demo(4)).report.dump());
}

TEST(Pipeline, UnregisteredShapeIsNoMatch) {
  PipelineConfig c = small_demo();
  c.scene_object = ShapeSpec{ShapeKind::Cylinder, {0.02, 0.1}, 2e5};
  const PipelineRun run = run_pipeline(c);
  EXPECT_NE(run.exit_code, 0);
  for (const Json& s : run.report["scenes"]) {
    EXPECT_EQ(s["error"]["kind"], "NoMatch");
    EXPECT_EQ(s["error"]["stage"], "match");
    EXPECT_TRUE(s["plan"].is_null());
  }
  EXPECT_EQ(run.report["summary"]["no_match"], 4);
}

TEST(Pipeline, StageFailureKeepsSchema) {
  PipelineConfig c = small_demo();
  c.stations = 2;  // too few for hand-eye
  const PipelineRun run = run_pipeline(c);
  EXPECT_NE(run.exit_code, 0);
  const Json& r = run.report;
  EXPECT_EQ(r["hand_eye"]["status"], "error");
  EXPECT_EQ(r["hand_eye"]["error"]["kind"], "TooFewSamples");
  EXPECT_TRUE(r["hand_eye"]["result"].is_null());
  EXPECT_EQ(r["registration"]["error"]["kind"], "Skipped");
  for (const Json& s : r["scenes"]) {
    EXPECT_TRUE(s.contains("grasp_error"));
    EXPECT_TRUE(s.contains("plan"));
  }
  EXPECT_TRUE(r.contains("summary"));
}

TEST(Pipeline, DepthCheckReportsBias) {
  PipelineConfig c = small_demo();
  c.scenes = 1;
  c.depth_bias = 0.004;
  const Json d = run_pipeline(c).report["calibration"]["depth_check"];
  EXPECT_NEAR(d["mean"].get<double>(), 0.004, 0.0002);
  EXPECT_EQ(d["injected_bias"], 0.004);
}
