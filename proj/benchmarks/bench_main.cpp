#include "cliffpoint/detection.hpp"
#include "cliffpoint/scoring.hpp"
#include "cliffpoint/synth.hpp"

#include <benchmark/benchmark.h>

using namespace cliffpoint;

namespace {

PerformanceSeries noisy_cliff(int n) {
    SynthConfig sc;
    sc.n_points = n;
    sc.noise_sigma = 0.02;
    return generate_series(sc).series;
}

void BM_Synth(benchmark::State& state) {
    SynthConfig sc;
    sc.n_points = static_cast<int>(state.range(0));
    sc.noise_sigma = 0.02;
    for (auto _ : state) benchmark::DoNotOptimize(generate_series(sc));
}
BENCHMARK(BM_Synth)->Arg(1000)->Arg(10000);

void BM_Method(benchmark::State& state) {
    const auto series = noisy_cliff(static_cast<int>(state.range(1)));
    const DegradationConfig cfg;
    const auto method = all_methods[static_cast<std::size_t>(state.range(0))];
    state.SetLabel(std::string(to_string(method)));
    for (auto _ : state) benchmark::DoNotOptimize(run_method(method, series, cfg));
}
BENCHMARK(BM_Method)->ArgsProduct({{0, 1, 2, 3, 4}, {1000, 10000}});

void BM_CrossValidate(benchmark::State& state) {
    const auto series = noisy_cliff(static_cast<int>(state.range(0)));
    const DegradationConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(cross_validate(run_all_methods(series, cfg)));
}
BENCHMARK(BM_CrossValidate)->Arg(1000)->Arg(10000);

void BM_DualF1(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(dual_f1("The committee met on Tuesday to discuss the budget",
                                         "the budget was discussed on tuesday"));
    }
}
BENCHMARK(BM_DualF1);

}  // namespace

BENCHMARK_MAIN();
