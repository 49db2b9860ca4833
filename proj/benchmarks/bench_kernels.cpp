#include <benchmark/benchmark.h>

#include "randblock/furstenberg.hpp"
#include "randblock/localization.hpp"
#include "randblock/lyapunov.hpp"
#include "randblock/spectral.hpp"
#include "randblock/transfer.hpp"
#include "randblock/xy_oracle.hpp"

using namespace randblock;

namespace {

const BlockEnsemble& xy_ensemble() {
  static const auto ens = BlockEnsemble::xy(0.5, SingleSiteDistribution::two_point(0, 1, 0.5));
  return ens;
}

void BM_Eigensolve(benchmark::State& state) {
  const auto M = xy_ensemble().sample(static_cast<int>(state.range(0)), 1, 0);
  const bool vectors = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(M, vectors));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigensolve)->Args({250, 0})->Args({1000, 0})->Args({200, 1})->Unit(benchmark::kMillisecond);

void BM_LyapunovSteps(benchmark::State& state) {
  LyapunovOptions o;
  o.steps = state.range(0);
  o.warmup = 0;
  o.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(xy_ensemble(), cplx(1.0, 0.5), o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovSteps)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_GreenBlock(benchmark::State& state) {
  const auto M = xy_ensemble().sample(static_cast<int>(state.range(0)), 2, 0);
  const int L = M.n();
  for (auto _ : state) benchmark::DoNotOptimize(green_block(M, cplx(0.3, 0.2), 1, L));
}
BENCHMARK(BM_GreenBlock)->Arg(50)->Arg(500);

void BM_GreenBlockDense(benchmark::State& state) {
  const auto M = xy_ensemble().sample(static_cast<int>(state.range(0)), 2, 0);
  const int L = M.n();
  for (auto _ : state) benchmark::DoNotOptimize(green_block_dense(M, cplx(0.3, 0.2), 1, L));
}
BENCHMARK(BM_GreenBlockDense)->Arg(50)->Arg(500);

void BM_Correlator(benchmark::State& state) {
  const auto S = eigensolve(xy_ensemble().sample(200, 4, 0), true);
  for (auto _ : state) benchmark::DoNotOptimize(eigenfunction_correlator(S, {0.5, 1.5}));
}
BENCHMARK(BM_Correlator)->Unit(benchmark::kMillisecond);

void BM_LieClosure(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lie_closure_dimension(1.3, 0.5));
}
BENCHMARK(BM_LieClosure)->Unit(benchmark::kMillisecond);

void BM_SupCommutators(benchmark::State& state) {
  const auto p = ModelParams::xy(static_cast<int>(state.range(0)), 0.5, SingleSiteDistribution::uniform(2.5, 3.5));
  const auto r = sample_disorder(p, 5, 0);
  LrOptions o;
  o.route = state.range(1) ? LrOptions::Route::dense : LrOptions::Route::quasi_free;
  o.t_grid.resize(40);
  for (std::size_t i = 0; i < o.t_grid.size(); ++i) o.t_grid[i] = 0.25 * static_cast<double>(i);
  for (auto _ : state) benchmark::DoNotOptimize(sup_commutators(p, r, o));
}
BENCHMARK(BM_SupCommutators)->Args({8, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
