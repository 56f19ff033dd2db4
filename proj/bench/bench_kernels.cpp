// Serial reference kernels against their OpenMP counterparts on a phantom
// vessel tree. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "corelr/hcz.hpp"
#include "corelr/morphology.hpp"
#include "corelr/phantom.hpp"
#include "corelr/skeleton.hpp"

using namespace corelr;

namespace {

struct Inputs {
  BinaryMask vessels;
  std::vector<RadiusPoint> centerline;
  ConvexHull hull;
  GridGeometry grid;
};

const Inputs& inputs() {
  static const Inputs in = [] {
    PhantomSpec spec;
    spec.seed = 3;
    spec.depth = 3;
    spec.dims = {128, 112, 112};
    spec.liver_semi_axes = {54, 46, 46};
    spec.trunk_length = 24.0;
    spec.length_min = 16.0;
    spec.length_max = 22.0;
    spec.root_radius = 4.5;
    spec.entry_offset = 12.0;
    Inputs r;
    r.vessels = extract_mask(generate_tree(spec).first, kVessel);
    const Skeleton s = attach_radii(skeletonize(r.vessels), edt(r.vessels));
    for (std::size_t i = 0; i < s.voxels.size(); ++i) {
      r.centerline.push_back({r.vessels.coords(s.voxels[i]), s.radius[i]});
    }
    r.hull = mask_hull(r.vessels);
    r.grid = r.vessels.geometry();
    return r;
  }();
  return in;
}

void BM_EdtParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(edt(inputs().vessels));
}
void BM_EdtReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::edt(inputs().vessels));
}
void BM_ErodeParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(erode(inputs().vessels));
}
void BM_ErodeReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::erode(inputs().vessels));
}
void BM_DilateParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dilate_by_radii(inputs().centerline, inputs().vessels));
}
void BM_DilateReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::dilate_by_radii(inputs().centerline, inputs().vessels));
}
void BM_VoxelizeParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(voxelize_hull(inputs().hull, inputs().grid));
}
void BM_VoxelizeReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::voxelize_hull(inputs().hull, inputs().grid));
}

}  // namespace

BENCHMARK(BM_EdtParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EdtReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErodeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ErodeReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilateReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VoxelizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VoxelizeReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
