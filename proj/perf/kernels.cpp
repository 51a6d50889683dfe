// Serial reference vs OpenMP paths of the hot kernels.

#include <map>

#include <benchmark/benchmark.h>

#include "colim/bench.hpp"
#include "colim/corr.hpp"
#include "colim/lim.hpp"
#include "colim/sde.hpp"

namespace {

using namespace colim;

const TimeSeries& series(int n) {
  static std::map<int, TimeSeries> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    SystemParams sys = bench::gen_system(n, 7);
    sde::SimConfig cfg;
    cfg.t1 = 1000.0;
    cfg.seed = 1;
    it = cache.emplace(n, sde::simulate_white(sys, cfg)).first;
  }
  return it->second;
}

corr::Exec exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? corr::Exec::serial : corr::Exec::parallel;
}

void BM_CorrLags(benchmark::State& state) {
  const TimeSeries& ts = series(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(corr::corr_lags(ts, 100, exec_of(state)));
}

void BM_IncrementLags(benchmark::State& state) {
  const TimeSeries& ts = series(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(corr::increment_lags(ts, 3, exec_of(state)));
}

void BM_LimSweep(benchmark::State& state) {
  const TimeSeries& ts = series(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lim::lim_sweep(ts, 1, 100, exec_of(state)));
}

void BM_RunBatch(benchmark::State& state) {
  bench::BenchConfig cfg;
  cfg.dims = {static_cast<int>(state.range(0))};
  cfg.tau = 0.1;
  cfg.t1 = 100.0;
  cfg.trials = 8;
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_batch(cfg, exec_of(state)));
}

void dims_and_exec(benchmark::internal::Benchmark* b) {
  for (int n : {1, 3, 5}) {
    for (int e : {0, 1}) b->Args({n, e});
  }
  b->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_CorrLags)->Apply(dims_and_exec);
BENCHMARK(BM_IncrementLags)->Apply(dims_and_exec);
BENCHMARK(BM_LimSweep)->Apply(dims_and_exec);
BENCHMARK(BM_RunBatch)->Apply(dims_and_exec)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
