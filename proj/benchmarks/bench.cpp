#include <benchmark/benchmark.h>

#include "caplab/biht.hpp"
#include "caplab/gaussian.hpp"
#include "caplab/lp.hpp"
#include "caplab/separability.hpp"
#include "caplab/subcritical.hpp"
#include "caplab/supercritical.hpp"

using namespace caplab;

static void BM_MakeGrid(benchmark::State& state) {
  for (auto _ : state) {
    QuadratureGrid g = make_grid(static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_MakeGrid)->Arg(100)->Arg(200)->Arg(400);

static void BM_SolveSubcritical(benchmark::State& state) {
  const QuadratureGrid g = make_grid(200);
  for (auto _ : state) {
    RSOrderParams p = solve_subcritical({0.5, 0.9}, g);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_SolveSubcritical);

static void BM_SolveSupercriticalWarm(benchmark::State& state) {
  const QuadratureGrid g = make_grid(200);
  const RescaledOrderParams warm = solve_supercritical_continued({0.5, 1.2}, g);
  for (auto _ : state) {
    RescaledOrderParams p = solve_supercritical({0.5, 1.21}, g, {}, &warm);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_SolveSupercriticalWarm);

static void BM_GreedyTrial(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const int P = static_cast<int>(1.2 * N);
  const Dataset d = generate_dataset(N, P, PatternKind::Binary, 42);
  BIHTConfig cfg;
  cfg.rng_seed = 42;
  for (auto _ : state) {
    TrialResult r = greedy_biht(d, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GreedyTrial)->Arg(32)->Arg(64);

static void BM_MarginLP(benchmark::State& state) {
  const Dataset d = generate_dataset(12, 16, PatternKind::Binary, 7);
  std::vector<int> cols(12);
  for (int i = 0; i < 12; ++i) cols[i] = i;
  const Eigen::MatrixXd A = signed_patterns(d, cols);
  for (auto _ : state) {
    double v = margin_lp_objective(A);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_MarginLP);

BENCHMARK_MAIN();
