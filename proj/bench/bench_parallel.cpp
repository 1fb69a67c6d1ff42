#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "catbbm/ensemble.hpp"
#include "catbbm/estimators.hpp"

using namespace catbbm;

namespace {

EnsembleSpec spec(int threads) {
    EnsembleSpec s;
    s.params = {1.0, 0.0, 9.0};
    s.n_runs = 2000;
    s.level_offsets = {0.0, 1.0};
    s.base_seed = 1;
    s.parallelism = threads;
    return s;
}

void BM_EnsembleSerial(benchmark::State& state) {
    const EnsembleSpec s = spec(1);
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(s));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.n_runs));
}

void BM_EnsembleParallel(benchmark::State& state) {
    const EnsembleSpec s = spec(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(s));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.n_runs));
}

struct MixtureInput {
    std::vector<double> ys, ms;
    MixtureInput() {
        for (int i = 0; i < 2001; ++i) ys.push_back(-1.0 + 0.0025 * i);
        RngStream rng(3, 0);
        for (int i = 0; i < 20000; ++i) ms.push_back(-std::log(rng.uniform_open()));
    }
};

void BM_MixtureSerial(benchmark::State& state) {
    static const MixtureInput in;
    for (auto _ : state) benchmark::DoNotOptimize(estimators::mixture_cdf_grid_serial(0.5, in.ys, in.ms));
}

void BM_MixtureParallel(benchmark::State& state) {
    static const MixtureInput in;
    for (auto _ : state) benchmark::DoNotOptimize(estimators::mixture_cdf_grid(0.5, in.ys, in.ms));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
