// Serial reference vs OpenMP kernels, plus run-level parallelism.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "usnl/eval.hpp"
#include "usnl/kernels.hpp"
#include "usnl/train.hpp"

using namespace usnl;

namespace {

struct Fixture {
  TripleStore store;
  std::vector<Position> positions;
  FactorState state;
};

// A 4181-entity store near the density of the largest protein network.
const Fixture& fixture(std::size_t pairs) {
  static std::vector<std::pair<std::size_t, Fixture>> cache;
  for (const auto& [k, f] : cache) {
    if (k == pairs) return f;
  }
  const std::size_t n = 4181;
  std::mt19937_64 rng(pairs);
  std::uniform_int_distribution<Index> idx(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RawTriple> raw(pairs);
  for (auto& t : raw) t = {idx(rng), idx(rng), unit(rng)};
  TripleStore store = build_store(raw, n);
  std::vector<Position> positions(store.size());
  for (std::size_t k = 0; k < positions.size(); ++k) positions[k] = static_cast<Position>(k);
  FactorState state = init_factors(n, 20, MappingKind::Sigmoid, 0.03, 1);
  cache.emplace_back(pairs, Fixture{std::move(store), std::move(positions), std::move(state)});
  return cache.back().second;
}

template <double (*Kernel)(const FactorState&, const TripleStore&, std::span<const Position>)>
void reduction(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(f.state, f.store, f.positions));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.positions.size()));
}

template <std::vector<double> (*Kernel)(const FactorState&)>
void mapping(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Kernel(f.state));
}

void restarts(benchmark::State& st) {
  static const auto syn = make_synthetic(200, 4, 0.2, 0.0, 1);
  static const auto plan = make_folds(syn.store, 1);
  static const Split split = plan.split(0);
  TrainConfig cfg;
  cfg.d = 8;
  cfg.eta = 0.5;
  cfg.max_iters = 100;
  std::vector<RunTask> tasks;
  for (std::uint64_t s = 0; s < 16; ++s) {
    cfg.seed = 1 + s;
    tasks.push_back({&split, cfg});
  }
  const int jobs = st.range(0) == 0 ? omp_get_num_procs() : static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_batch(syn.store, tasks, jobs));
  st.counters["jobs"] = jobs;
}

}  // namespace

BENCHMARK(reduction<reference::squared_residual_sum>)->Name("squared_residual_sum/serial")->Arg(100000)->Arg(1000000);
BENCHMARK(reduction<parallel::squared_residual_sum>)->Name("squared_residual_sum/omp")->Arg(100000)->Arg(1000000);
BENCHMARK(reduction<reference::loss_sum>)->Name("loss_sum/serial")->Arg(100000)->Arg(1000000);
BENCHMARK(reduction<parallel::loss_sum>)->Name("loss_sum/omp")->Arg(100000)->Arg(1000000);
BENCHMARK(mapping<reference::map_factors>)->Name("map_factors/serial")->Arg(100000);
BENCHMARK(mapping<parallel::map_factors>)->Name("map_factors/omp")->Arg(100000);
BENCHMARK(restarts)->Name("run_batch")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
