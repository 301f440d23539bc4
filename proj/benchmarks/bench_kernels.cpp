#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "subdiff/coeffs.hpp"
#include "subdiff/examples.hpp"
#include "subdiff/linsolve.hpp"
#include "subdiff/operators.hpp"
#include "subdiff/pde1d.hpp"
#include "subdiff/pde2d.hpp"

using namespace subdiff;

namespace {

std::vector<cplx> ramp(int n) {
  std::vector<cplx> v(n);
  for (int i = 0; i < n; ++i) v[i] = {std::sin(0.1 * i), std::cos(0.3 * i)};
  return v;
}

Tridiag compact_matrix(int n) {
  Tridiag A;
  A.diag.assign(n, {1.2, 0.4});
  A.sub.assign(n - 1, {-0.45, 0.01});
  A.sup.assign(n - 1, {-0.45, 0.01});
  return A;
}

} // namespace

static void BM_Weights(benchmark::State& state) {
  const FracParams p{0.5, {1.0, 1.0}, 1e-3};
  for (auto _ : state) benchmark::DoNotOptimize(substantial_weights(p, state.range(0)));
}
BENCHMARK(BM_Weights)->Arg(1 << 10)->Arg(1 << 14);

static void BM_HistorySum(benchmark::State& state) {
  const int n = state.range(0);
  const int points = 64;
  const WeightTable w = substantial_weights({0.5, {1.0, 1.0}, 1.0 / n}, n);
  std::vector<Field> history(n + 1, Field::line(points));
  for (auto& f : history) f.values = ramp(points);
  for (auto _ : state) benchmark::DoNotOptimize(substantial_history_sum(w, history, n));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * points);
}
BENCHMARK(BM_HistorySum)->Arg(256)->Arg(4096);

static void BM_Thomas(benchmark::State& state) {
  const int n = state.range(0);
  const Tridiag A = compact_matrix(n);
  const auto b = ramp(n);
  for (auto _ : state) benchmark::DoNotOptimize(thomas_solve(A, b));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Thomas)->Arg(64)->Arg(4096);

static void BM_BandedSolve(benchmark::State& state) {
  const int m = state.range(0);
  const int n = m * m;
  BandedMatrix A(n, m + 1, m + 1);
  for (int i = 0; i < n; ++i) {
    A.set(i, i, {4.5, 0.1});
    if (i + 1 < n) A.set(i, i + 1, -1.0), A.set(i + 1, i, -1.0);
    if (i + m < n) A.set(i, i + m, -1.0), A.set(i + m, i, -1.0);
    if (i + m + 1 < n) A.set(i, i + m + 1, -0.1), A.set(i + m + 1, i, -0.1);
  }
  const BandedFactor F = banded_factor(A);
  const auto b = ramp(n);
  for (auto _ : state) benchmark::DoNotOptimize(banded_solve(F, b));
}
BENCHMARK(BM_BandedSolve)->Arg(31)->Arg(59);

static void BM_Solve1D(benchmark::State& state) {
  const Problem1D p = feynman_kac_1d(0.5);
  SchemeConfig cfg;
  cfg.alpha = 0.5;
  cfg.M = 40;
  cfg.N = state.range(0);
  cfg.sampling = TimeSampling::shifted_point;
  cfg.keep_history = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_1d(p, cfg));
}
BENCHMARK(BM_Solve1D)->Arg(40)->Arg(640)->Unit(benchmark::kMillisecond);

static void BM_Solve2D(benchmark::State& state) {
  const Problem2D p = feynman_kac_2d(0.2);
  SchemeConfig2D cfg;
  cfg.alpha = 0.2;
  cfg.M1 = cfg.M2 = 60;
  cfg.N = state.range(0);
  cfg.corrections = 2;
  cfg.start = StartPolicy::exact;
  cfg.keep_history = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_2d(p, cfg));
}
BENCHMARK(BM_Solve2D)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
