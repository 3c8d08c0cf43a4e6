#include <benchmark/benchmark.h>

#include "siapprox/dfilter.hpp"
#include "siapprox/kernel.hpp"
#include "siapprox/operators.hpp"
#include "siapprox/signals.hpp"

namespace {

using namespace siapprox;

void BM_KernelEval(benchmark::State& state) {
    const auto phi = bspline1d_centered(static_cast<int>(state.range(0)));
    double x = -1.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi(x));
        x += 1e-4;
        if (x > 1.9) x = -1.9;
    }
}
BENCHMARK(BM_KernelEval)->Arg(2)->Arg(4)->Arg(6);

void BM_PrefilterInvert(benchmark::State& state) {
    const auto phi = bspline1d_centered(4);
    for (auto _ : state)
        benchmark::DoNotOptimize(interp_prefilter_axis(phi, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PrefilterInvert)->Arg(1024)->Arg(4096);

void BM_Synthesize1D(benchmark::State& state) {
    const auto kernel = std::make_shared<SeparableKernel>(bspline_centered(4));
    const auto f = make_growing_oscillation(1.0, 3.0, 1);
    const double h = 0.125;
    const auto c = interpolate(*f, kernel, h, 8.0);
    double x = -7.5;
    for (auto _ : state) {
        const double xx[1] = {x};
        benchmark::DoNotOptimize(synthesize(c, xx));
        x += 1e-3;
        if (x > 7.5) x = -7.5;
    }
}
BENCHMARK(BM_Synthesize1D);

void BM_ProjectAnalysis(benchmark::State& state) {
    const auto kernel = std::make_shared<SeparableKernel>(bspline_centered(4));
    const auto f = make_growing_oscillation(1.0, 3.0, 1);
    const double h = std::ldexp(1.0, -static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(project(*f, kernel, h, 8.0));
}
BENCHMARK(BM_ProjectAnalysis)->Arg(3)->Arg(5);

void BM_SignalJetMagnitude(benchmark::State& state) {
    const auto f = make_growing_oscillation(1.0, 3.0, 1);
    double x = -20.0;
    for (auto _ : state) {
        const double xx[1] = {x};
        benchmark::DoNotOptimize(f->derivative_magnitude(4, xx));
        x += 1e-3;
        if (x > 20.0) x = -20.0;
    }
}
BENCHMARK(BM_SignalJetMagnitude);

}  // namespace

BENCHMARK_MAIN();
