#include <benchmark/benchmark.h>

#include "pickplace/cloud.hpp"
#include "pickplace/kdtree.hpp"
#include "pickplace/register.hpp"
#include "pickplace/rng.hpp"
#include "pickplace/sim.hpp"

using namespace pickplace;

namespace {

std::vector<Vec3> random_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  return pts;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->RangeMultiplier(10)->Range(1000, 100000);

void BM_KdTreeNearest(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2);
  const KdTree tree(pts);
  const auto queries = random_points(1024, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tree.nearest(queries[i++ & 1023]));
}
BENCHMARK(BM_KdTreeNearest)->RangeMultiplier(10)->Range(1000, 100000);

void BM_Icp(benchmark::State& state) {
  const ShapeSpec box{ShapeKind::Box, {0.12, 0.08, 0.04}, static_cast<double>(state.range(0))};
  const Pose camera = look_at(Vec3(0.6, -0.4, 0.5), Vec3::Zero());
  const PointCloud model = synth_cloud(box, 4);
  const PointCloud source = simulate_view(model, ViewSpec{Pose::identity(), camera, 0.001, Visibility::CameraFacing, 5});
  const Pose truth(rodrigues_exp(Vec3(0.1, -0.2, 0.15)), Vec3(0.02, -0.01, 0.03));
  PointCloud target = simulate_view(
      model, ViewSpec{truth, compose(truth, camera), 0.001, Visibility::CameraFacing, 6});
  target = estimate_normals(target, 12, compose(truth, camera).translation);
  const IcpVariant variant = state.range(1) ? IcpVariant::PointToPlane : IcpVariant::PointToPoint;
  for (auto _ : state) benchmark::DoNotOptimize(icp(source, target, Pose::identity(), IcpParams{60, 0.1, 1e-7, variant}));
  state.counters["points"] = static_cast<double>(source.size());
}
BENCHMARK(BM_Icp)->ArgsProduct({{50000, 200000, 500000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_VoxelDownsample(benchmark::State& state) {
  PointCloud c;
  c.points = random_points(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(voxel_downsample(c, 0.05));
}
BENCHMARK(BM_VoxelDownsample)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
