#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <anykernel/binary.hpp>
#include <anykernel/eval.hpp>
#include <anykernel/graph_kernels.hpp>
#include <anykernel/kernel.hpp>
#include <anykernel/nature.hpp>

using namespace anykernel;

namespace {

std::vector<Point> bit_points(int n, int count) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < count; ++i) {
    BitVector b;
    for (int j = 0; j < n; ++j) b.bits.push_back(u(rng) < 0.5 ? -1 : 1);
    pts.push_back(Point{Features(b), u(rng)});
  }
  return pts;
}

void BM_LowDegreeKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto k = low_degree_kernel(n, 2);
  const auto pts = bit_points(n, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(pts[i % 64], pts[(i + 1) % 64]));
    ++i;
  }
}
BENCHMARK(BM_LowDegreeKernel)->Arg(8)->Arg(32);

void BM_SobolevKernel(benchmark::State& state) {
  const auto k = sobolev_unit_kernel();
  const auto pts = bit_points(1, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(pts[i % 64], pts[(i + 1) % 64]));
    ++i;
  }
}
BENCHMARK(BM_SobolevKernel);

// Full runs; per-round cost grows with t, so the whole run is timed.
void BM_BinaryRun(benchmark::State& state) {
  const auto T = state.range(0);
  for (auto _ : state) {
    BinaryPredictor pred(grid_bin_kernel(10) * low_degree_kernel(6, 2), 1);
    auto nature = make_performative_sigmoid(0.5, -1.5, 1, 6);
    benchmark::DoNotOptimize(simulate(*nature, pred, T));
  }
  state.SetComplexityN(T);
}
BENCHMARK(BM_BinaryRun)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

void BM_LinkpredRun(benchmark::State& state) {
  const auto T = state.range(0);
  for (auto _ : state) {
    GraphEvolution nature(GraphEvolutionParams{}, 1);
    BinaryPredictor pred(pair_groups_kernel(nature.groups(), 10), 1);
    benchmark::DoNotOptimize(simulate(nature, pred, T));
  }
}
BENCHMARK(BM_LinkpredRun)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_KernelCalibrationError(benchmark::State& state) {
  BinaryPredictor pred(constant_kernel(1.0), 2);
  auto nature = make_contrarian(2);
  const auto rounds = simulate(*nature, pred, state.range(0));
  const auto k = sobolev_unit_kernel();
  for (auto _ : state) benchmark::DoNotOptimize(kernel_calibration_error(rounds, k));
}
BENCHMARK(BM_KernelCalibrationError)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
