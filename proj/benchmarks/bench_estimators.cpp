#include <benchmark/benchmark.h>

#include <cmath>

#include "mfa/boxmethods.hpp"
#include "mfa/fluctmethods.hpp"
#include "mfa/generators.hpp"
#include "mfa/grids.hpp"
#include "mfa/surrogates.hpp"

using namespace mfa;

static void BM_MfDfa(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto x = gen_fgn(0.7, n, 1);
    auto scales = make_scales(n, ScaleSpacing::geometric, 16, n / 8, std::sqrt(2.0));
    auto qs = make_moments(-4.0, 4.0, 0.25);
    for (auto _ : state) {
        auto surf = detrended_fluctuation(x, scales, qs, DetrendConfig{});
        benchmark::DoNotOptimize(surf.log_f);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MfDfa)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Complexity();

static void BM_MfDmaBackward(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto x = gen_fgn(0.7, n, 1);
    auto scales = make_scales(n, ScaleSpacing::geometric, 16, n / 8, std::sqrt(2.0));
    auto qs = make_moments(-4.0, 4.0, 0.25);
    DetrendConfig cfg{Detrender::dma, 1, 0.0, Covering::both_ends};
    for (auto _ : state) {
        auto surf = detrended_fluctuation(x, scales, qs, cfg);
        benchmark::DoNotOptimize(surf.log_f);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MfDmaBackward)->RangeMultiplier(4)->Range(1 << 12, 1 << 18)->Complexity();

static void BM_PartitionFunction(benchmark::State& state) {
    int levels = static_cast<int>(state.range(0));
    auto m = gen_binomial(0.3, levels);
    auto scales = make_scales(m.size(), ScaleSpacing::dyadic, 8, m.size() / 4);
    auto qs = make_moments(-10.0, 10.0, 0.5);
    for (auto _ : state) {
        auto ps = partition_function(m, scales, qs);
        benchmark::DoNotOptimize(ps.log_chi);
    }
}
BENCHMARK(BM_PartitionFunction)->DenseRange(14, 20, 2);

static void BM_WaveletLeaders(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto x = gen_fgn(0.7, n, 3);
    auto qs = make_moments(-2.0, 4.0, 0.5);
    for (auto _ : state) {
        auto wl = wavelet_leaders(x, qs, 4);
        benchmark::DoNotOptimize(wl.spectrum.tau);
    }
}
BENCHMARK(BM_WaveletLeaders)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);

static void BM_Iaaft(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto x = gen_mrw(MrwSpec{0.05, 1.0, n, n, 5});
    for (auto _ : state) {
        auto res = iaaft_surrogate(x, 7, 30, 1e-6);
        benchmark::DoNotOptimize(res.series.values);
    }
}
BENCHMARK(BM_Iaaft)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

static void BM_GenMrw(benchmark::State& state) {
    MrwSpec spec;
    spec.n = static_cast<std::size_t>(state.range(0));
    spec.integral_scale = spec.n;
    spec.seed = 11;
    for (auto _ : state) {
        auto x = gen_mrw(spec);
        benchmark::DoNotOptimize(x.values);
    }
}
BENCHMARK(BM_GenMrw)->RangeMultiplier(4)->Range(1 << 12, 1 << 18);

BENCHMARK_MAIN();
