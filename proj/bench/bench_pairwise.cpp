// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to compare thread counts.

#include <random>

#include <benchmark/benchmark.h>

#include "gazesim/analysis.hpp"
#include "gazesim/cluster.hpp"
#include "gazesim/simmatrix.hpp"

using namespace gazesim;

namespace {

std::vector<PointSeries> random_paths(std::size_t viewers, std::size_t frames) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1920.0);
  std::vector<PointSeries> out(viewers, PointSeries(frames));
  for (auto& s : out) {
    for (auto& p : s) p = {u(rng), u(rng)};
  }
  return out;
}

CohortDataset random_cohort(std::size_t viewers, std::size_t frames) {
  CohortDataset c;
  c.frame_rate_fps = 32.0;
  const auto paths = random_paths(viewers, frames);
  for (std::size_t v = 0; v < viewers; ++v) {
    FixationSeries s;
    s.viewer_id = "v" + std::to_string(v);
    s.frame_rate_fps = 32.0;
    for (const auto& p : paths[v]) {
      s.xs.push_back(p.x);
      s.ys.push_back(p.y);
      s.mask.push_back(true);
    }
    c.viewers.emplace(s.viewer_id, std::move(s));
  }
  return c;
}

// args: viewers, frames
void BM_PairwiseSerial(benchmark::State& state) {
  const auto paths = random_paths(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_distance_matrix_serial(paths, {5000, 5000}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}

void BM_PairwiseParallel(benchmark::State& state) {
  const auto paths = random_paths(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_distance_matrix(paths, {5000, 5000}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}

void BM_SweepSerial(benchmark::State& state) {
  const auto cohort = random_cohort(8, 160);
  const WindowSpec w{0, 5};
  for (auto _ : state) {
    for (const double l : kDefaultSweepValues) {
      for (const double g : kDefaultSweepValues) {
        benchmark::DoNotOptimize(
            pairwise_distance_matrix_serial(window_points(cohort, w), TwedParams{l, g}));
      }
    }
  }
}

void BM_SweepParallel(benchmark::State& state) {
  const auto cohort = random_cohort(8, 160);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parameter_sweep(cohort, {0, 5}, kDefaultSweepValues, kDefaultSweepValues));
  }
}

void BM_CommunityScales(benchmark::State& state) {
  const auto cohort = random_cohort(state.range(0), 64);
  const WindowSpec w{0, 2};
  const auto sim = compute_window_matrices(cohort, std::span<const WindowSpec>(&w, 1), {5000, 5000}).front();
  const auto graph = build_graph(sim);
  const std::vector<double> scales{0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(detect_communities(graph, scales, 1));
}

}  // namespace

BENCHMARK(BM_PairwiseSerial)->Args({12, 160})->Args({12, 960})->Args({32, 160})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseParallel)->Args({12, 160})->Args({12, 960})->Args({32, 160})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommunityScales)->Arg(12)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
