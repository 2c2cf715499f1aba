#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"
#include "pickplace/error.hpp"
#include "pickplace/ply.hpp"

using namespace pickplace;

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t n, bool normals) {
  Rng rng(seed);
  PointCloud c;
  c.points = oracle::random_points(rng, n);
  if (normals)
    for (std::size_t i = 0; i < n; ++i) c.normals.push_back(rng.unit_vec3());
  return c;
}

void expect_identical(const PointCloud& a, const PointCloud& b) {
  ASSERT_EQ(a.size(), b.size());
  ASSERT_EQ(a.normals.size(), b.normals.size());
  EXPECT_EQ(a.frame, b.frame);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
  for (std::size_t i = 0; i < a.normals.size(); ++i) EXPECT_EQ(a.normals[i], b.normals[i]);
}

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Ply, AsciiRoundtripIsBitExact) {
  const auto dir = oracle::scratch_dir("ply_ascii");
  for (bool normals : {false, true}) {
    PointCloud c = random_cloud(31, 500, normals);
    c.frame = FrameId::camera();
    save_ply(c, dir / "a.ply", PlyEncoding::Ascii);
    expect_identical(c, load_ply(dir / "a.ply"));
  }
}

TEST(Ply, BinaryRoundtripIsBitExact) {
  const auto dir = oracle::scratch_dir("ply_binary");
  const PointCloud c = random_cloud(32, 500, true);
  save_ply(c, dir / "b.ply", PlyEncoding::BinaryLittleEndian);
  expect_identical(c, load_ply(dir / "b.ply"));
}

TEST(Ply, EmptyCloudRoundtrip) {
  const auto dir = oracle::scratch_dir("ply_empty");
  save_ply(PointCloud{}, dir / "e.ply");
  EXPECT_TRUE(load_ply(dir / "e.ply").empty());
}

TEST(Ply, ExtraPropertiesWarn) {
  const auto dir = oracle::scratch_dir("ply_extra");
  write_text(dir / "x.ply",
             "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
             "property uchar red\nend_header\n0 0 0 255\n1 2 3 10\n");
  std::vector<std::string> warnings;
  const PointCloud c = load_ply(dir / "x.ply", &warnings);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[1], Vec3(1, 2, 3));
  EXPECT_EQ(c.frame, FrameId::robot_base());
  EXPECT_FALSE(warnings.empty());
}

TEST(Ply, TruncatedFileIsParseError) {
  const auto dir = oracle::scratch_dir("ply_trunc");
  write_text(dir / "t.ply",
             "ply\nformat ascii 1.0\nelement vertex 3\nproperty double x\nproperty double y\nproperty double z\n"
             "end_header\n0 0 0\n1 1 1\n");
  try {
    load_ply(dir / "t.ply");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
}

TEST(Ply, MissingFileIsIoError) {
  try {
    load_ply("/nonexistent/cloud.ply");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}
