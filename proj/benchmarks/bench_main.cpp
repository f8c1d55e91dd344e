#include "csilsh/channel_sim.hpp"
#include "csilsh/fingerprint_store.hpp"
#include "csilsh/lsh_index.hpp"
#include "csilsh/random.hpp"
#include "csilsh/stone_transform.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

std::vector<double> random_vector(std::size_t d, std::uint64_t seed) {
    csilsh::Rng rng(seed);
    std::vector<double> v(d);
    for (auto& x : v) {
        x = rng.normal();
    }
    return v;
}

const csilsh::SceneSplit& scene() {
    static const csilsh::SceneSplit split = [] {
        csilsh::SceneConfig cfg;
        cfg.seed = 3;
        return csilsh::generate_scene_split(cfg, 200);
    }();
    return split;
}

void BM_StoneApply(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto plan = csilsh::build_plan(d);
    const auto in = random_vector(d, 1);
    std::vector<double> out(d);
    for (auto _ : state) {
        csilsh::apply(plan, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StoneApply)->RangeMultiplier(4)->Range(16, 16384);

void BM_Sketch(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto plan = csilsh::build_plan(d);
    const auto diag = csilsh::make_sign_diagonal(d, 2);
    const auto in = random_vector(d, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(csilsh::sketch(plan, diag, in));
    }
}
BENCHMARK(BM_Sketch)->RangeMultiplier(4)->Range(16, 16384);

void BM_BuildIndex(benchmark::State& state) {
    const auto& split = scene();
    const csilsh::HashConfig cfg{split.database.dim(), 12, static_cast<std::size_t>(state.range(0)), 1, 5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(csilsh::build_index(split.database, cfg));
    }
}
BENCHMARK(BM_BuildIndex)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_QueryCandidates(benchmark::State& state) {
    const auto& split = scene();
    const auto delta = static_cast<std::size_t>(state.range(0));
    const auto index = csilsh::build_index(split.database, {split.database.dim(), 12, 4, delta, 5});
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(csilsh::query_candidates(index, split.queries.fingerprint(q), delta));
        q = (q + 1) % split.queries.size();
    }
}
BENCHMARK(BM_QueryCandidates)->DenseRange(0, 2);

void BM_ApproxKnn(benchmark::State& state) {
    const auto& split = scene();
    const auto index = csilsh::build_index(split.database, {split.database.dim(), 12, 4, 1, 5});
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(csilsh::approx_knn(index, split.database, split.queries.fingerprint(q), 2, 1));
        q = (q + 1) % split.queries.size();
    }
}
BENCHMARK(BM_ApproxKnn);

void BM_ExactKnn(benchmark::State& state) {
    const auto& split = scene();
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(csilsh::exact_knn(split.database, split.queries.fingerprint(q), 2));
        q = (q + 1) % split.queries.size();
    }
}
BENCHMARK(BM_ExactKnn);

} // namespace

BENCHMARK_MAIN();
