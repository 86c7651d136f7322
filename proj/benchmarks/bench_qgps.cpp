#include <benchmark/benchmark.h>

#include "qgps/amplification.hpp"
#include "qgps/quantum_search_step.hpp"

using namespace qgps;

namespace {

void BM_GroverIterate(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  auto planted = make_planted_problem(n, 1, 0);
  GroverIterate q(planted.problem);
  OracleLedger ledger;
  SparseState s = q.prepare(ledger);
  for (auto _ : st) {
    q.apply(s, ledger);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_GroverIterate)->RangeMultiplier(4)->Range(16, 1024);

void BM_ModifiedQSearch(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto t = static_cast<std::size_t>(st.range(1));
  auto planted = make_planted_problem(n, t, 0);
  std::uint64_t seed = 0;
  for (auto _ : st) {
    QSearchParams params;
    params.rng_seed = seed++;
    benchmark::DoNotOptimize(modified_qsearch(planted.problem, params));
  }
}
BENCHMARK(BM_ModifiedQSearch)->Args({64, 1})->Args({256, 1})->Args({256, 4})->Args({1024, 1})
    ->Unit(benchmark::kMicrosecond);

void BM_GpsSphere(benchmark::State& st) {
  const bool quantum = st.range(0) != 0;
  const PatternBasis basis = PatternBasis::coordinate(2);
  auto sphere = [](const Vector& x) { return x.squaredNorm(); };
  Vector x0(2);
  x0 << 3, -2;
  std::uint64_t seed = 0;
  for (auto _ : st) {
    GpsConfig cfg;
    cfg.rng_seed = seed;
    QSearchParams params;
    params.rng_seed = seed++;
    const auto backend = quantum ? quantum_backend(basis, cfg, params, sphere) : classical_backend(basis, cfg, sphere);
    benchmark::DoNotOptimize(gps_run(sphere, basis, x0, cfg, backend));
  }
}
BENCHMARK(BM_GpsSphere)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
