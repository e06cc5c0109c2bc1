#include <benchmark/benchmark.h>

#include <vector>

#include "lko/experiment.hpp"
#include "lko/filter.hpp"
#include "lko/importance.hpp"
#include "lko/local_selection.hpp"
#include "lko/markov.hpp"
#include "lko/rng.hpp"
#include "lko/synthdata.hpp"

using namespace lko;

namespace {

auto dataset(std::size_t n) {
    RunConfig c;
    const auto design = build_design(c.d, c.q_total, 7);
    return generate_experiment_dataset(c.chain(), design, n, 11);
}

void BM_KnockoffMarkov(benchmark::State& state) {
    RunConfig c;
    const auto chain = c.chain();
    const auto x = sample_markov(chain, static_cast<std::size_t>(state.range(0)), 3);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(knockoff_markov(chain, x, ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnockoffMarkov)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_LogisticScores(benchmark::State& state) {
    const auto ex = dataset(static_cast<std::size_t>(state.range(0)));
    LogisticFitConfig config;
    for (auto _ : state) benchmark::DoNotOptimize(logistic_scores(ex.data, config));
}
BENCHMARK(BM_LogisticScores)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Threshold(benchmark::State& state) {
    Stream rng(5, {});
    std::vector<double> w(static_cast<std::size_t>(state.range(0)));
    for (auto& v : w) v = rng.uniform() - 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(knockoff_threshold(w, 0.2));
}
BENCHMARK(BM_Threshold)->Arg(50)->Arg(1000)->Arg(100000);

void BM_LocalSelection(benchmark::State& state) {
    RunConfig c;
    const auto design = build_design(c.d, c.q_total, 7);
    const auto ex = generate_experiment_dataset(c.chain(), design, 2000, 11);
    const auto plan = oracle_plan(design, static_cast<std::size_t>(state.range(0)), c.radius, c.scores);
    for (auto _ : state) benchmark::DoNotOptimize(run_local_selection(ex.data, plan, c.q, 1));
}
BENCHMARK(BM_LocalSelection)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
