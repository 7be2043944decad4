#include "hibarrier/catalog.hpp"
#include "hibarrier/certificates.hpp"
#include "hibarrier/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace hibarrier;

namespace {

config::Model fixture(const char* id) { return config::build_model(catalog::load(id)); }

void BM_ProjectDisk(benchmark::State& state) {
    const auto m = fixture("bouncing-ball");
    const auto k = build_k_complex(m.system, m.barrier);
    const Vec x{{1.2, 0.9}};
    for (auto _ : state) benchmark::DoNotOptimize(project(k.K, x));
}
BENCHMARK(BM_ProjectDisk);

void BM_ProjectUnion(benchmark::State& state) {
    const auto m = fixture("expcount");
    const Vec x{{0.3, 0.05}};
    for (auto _ : state) benchmark::DoNotOptimize(project(m.system.C, x));
}
BENCHMARK(BM_ProjectUnion);

void BM_ConeAnalytic(benchmark::State& state) {
    const auto m = fixture("exprj");
    const Vec x{{1.0, 0.0}};
    const Vec v{{-1.0, -1.0}};
    for (auto _ : state) benchmark::DoNotOptimize(contingent_cone_member_analytic(m.system.C, x, v));
}
BENCHMARK(BM_ConeAnalytic);

void BM_ConeNumeric(benchmark::State& state) {
    const auto m = fixture("expcount");
    const Vec x{{0.0, 0.0}};
    const Vec v{{1.0, 0.0}};
    for (auto _ : state) benchmark::DoNotOptimize(contingent_cone_member(m.system.C, x, v));
}
BENCHMARK(BM_ConeNumeric);

void BM_SolveThermostat(benchmark::State& state) {
    const auto m = fixture("thermostat");
    const Horizon hz{5.0, 10, 1.0 / static_cast<double>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(solve(m.system, Vec{{0.0, 1.0}}, SelectionPolicy{}, hz));
    state.SetItemsProcessed(state.iterations() * 5 * state.range(0));
}
BENCHMARK(BM_SolveThermostat)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CheckThm1(benchmark::State& state) {
    const auto m = fixture("thermostat");
    CheckConfig cfg;
    cfg.box = m.box;
    cfg.samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(check_thm1(m.system, m.barrier, cfg));
}
BENCHMARK(BM_CheckThm1)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
