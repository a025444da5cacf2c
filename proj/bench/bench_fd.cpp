// fd_check (OpenMP over columns) against its serial reference, and the
// oracle batch against one-by-one oracle runs.

#include <benchmark/benchmark.h>

#include "scc/adjoint.hpp"
#include "scc/marginals.hpp"

namespace {

const scc::Params& params(int which) {
  static const scc::Params desk = scc::load_params(SCC_BENCH_DATA_DIR "/desk.params");
  static const scc::Params full = scc::load_params(SCC_BENCH_DATA_DIR "/dice2016.params");
  return which == 0 ? desk : full;
}

void BM_FdCheckParallel(benchmark::State& state) {
  const scc::Params& p = params(static_cast<int>(state.range(0)));
  const scc::Controls u = scc::interior_sample(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(scc::fd_check(p, u, 1e-5));
  state.SetLabel("t_max=" + std::to_string(p.t_max));
}

void BM_FdCheckSerial(benchmark::State& state) {
  const scc::Params& p = params(static_cast<int>(state.range(0)));
  const scc::Controls u = scc::interior_sample(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(scc::fd_check_serial(p, u, 1e-5));
  state.SetLabel("t_max=" + std::to_string(p.t_max));
}

const scc::OptResult& desk_optimum() {
  static const scc::OptResult r = scc::optimize(params(0), {});
  return r;
}

const std::vector<int> kPeriods{2, 5, 8, 10, 12, 15};

void BM_OracleBatch(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(scc::oracle_batch(params(0), {}, desk_optimum(), kPeriods, 1e-3));
  }
}

void BM_OracleSequential(benchmark::State& state) {
  for (auto _ : state) {
    for (int t : kPeriods) {
      benchmark::DoNotOptimize(scc::oracle_compensation(params(0), {}, desk_optimum(), t, 1e-3));
    }
  }
}

}  // namespace

BENCHMARK(BM_FdCheckParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FdCheckSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSequential)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
