#include <benchmark/benchmark.h>

#include "spsc/partition.hpp"
#include "spsc/policy_mc.hpp"
#include "spsc/policy_spsc.hpp"
#include "spsc/prey_predator.hpp"

using namespace spsc;

static void BM_PpStep(benchmark::State& state) {
    PreyPredatorConfig c;
    RandomStream s(1, 0);
    auto world = pp_initialize(c, s);
    for (int t = 0; t < 50; ++t) pp_step(c, world, s);
    const auto start = world;
    for (auto _ : state) {
        pp_step(c, world, s);
        if (world.agents.empty()) {
            state.PauseTiming();
            world = start;
            state.ResumeTiming();
        }
        benchmark::DoNotOptimize(world.agents.data());
    }
    state.counters["agents"] = static_cast<double>(world.agents.size());
}
BENCHMARK(BM_PpStep);

static void BM_KMeans(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    RandomStream gen(3, 0);
    std::vector<ObservableVector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(ObservableVector({400 * gen.uniform01(), 100 * gen.uniform01(), 2500 * gen.uniform01()}));
    }
    for (auto _ : state) {
        RandomStream s(5, 0);
        auto p = kmeans(pts, {15, 100}, s);
        benchmark::DoNotOptimize(p.wcss);
    }
}
BENCHMARK(BM_KMeans)->Arg(50)->Arg(500);

static void BM_McRun(benchmark::State& state) {
    PreyPredatorModel model{PreyPredatorConfig{}};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto r = mc_run(model, 50, 1000, seed++);
        benchmark::DoNotOptimize(r.finals.data());
    }
}
BENCHMARK(BM_McRun)->Unit(benchmark::kMillisecond);

static void BM_SpscRun(benchmark::State& state) {
    PreyPredatorModel model{PreyPredatorConfig{}};
    SpscConfig c;
    for (auto _ : state) {
        auto r = spsc_run(model, c);
        benchmark::DoNotOptimize(r.finals.data());
        ++c.master_seed;
    }
}
BENCHMARK(BM_SpscRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
