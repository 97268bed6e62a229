#include <benchmark/benchmark.h>

#include <bhdnet/hier.hpp>
#include <bhdnet/scores.hpp>
#include <bhdnet/search.hpp>
#include <bhdnet/simgen.hpp>

using namespace bhdnet;

namespace {

Replicate replicate(std::size_t nodes, std::size_t groups, std::size_t rows, int card = 2) {
    GenConfig cfg;
    cfg.nodes = nodes;
    cfg.groups = groups;
    cfg.rows_per_group = rows;
    cfg.card = card;
    cfg.seed = 3;
    return generate_replicate(cfg, 0, 0, 0);
}

void BM_FamilyCounts(benchmark::State& state) {
    const auto rep = replicate(10, 5, static_cast<std::size_t>(state.range(0)));
    const std::vector<std::size_t> parents{1, 2, 3};
    for (auto _ : state) benchmark::DoNotOptimize(family_counts(rep.data, 0, parents));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rep.data.total_rows()));
}
BENCHMARK(BM_FamilyCounts)->Arg(100)->Arg(1000);

void BM_BdeuLocal(benchmark::State& state) {
    const auto rep = replicate(10, 5, 500, 5);
    const std::vector<std::size_t> parents{1, 2};
    const auto counts = family_counts(rep.data, 0, parents);
    for (auto _ : state) benchmark::DoNotOptimize(bdeu_local_log_score(counts, 1.0));
}
BENCHMARK(BM_BdeuLocal);

void BM_VariationalFit(benchmark::State& state) {
    const auto rep = replicate(10, static_cast<std::size_t>(state.range(0)), 500, 2);
    std::vector<std::size_t> parents;
    for (std::int64_t p = 0; p < state.range(1); ++p) parents.push_back(static_cast<std::size_t>(p + 1));
    const auto counts = family_counts(rep.data, 0, parents);
    const auto prior = HierPrior::uniform(counts.num_cells(), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(fit_variational(counts, prior));
}
BENCHMARK(BM_VariationalFit)->Args({2, 0})->Args({5, 1})->Args({10, 2})->Args({10, 3});

void BM_HillClimb(benchmark::State& state) {
    const auto rep = replicate(static_cast<std::size_t>(state.range(0)), 5, 500);
    ScoreConfig cfg;
    cfg.kind = static_cast<ScoreKind>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(hill_climb(rep.data, cfg));
}
BENCHMARK(BM_HillClimb)
    ->ArgsProduct({{5, 10}, {static_cast<std::int64_t>(ScoreKind::bdeu), static_cast<std::int64_t>(ScoreKind::bhd)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
