#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "qgraph/spectrum.hpp"

using namespace qgraph;

static void BM_ScanSpectrum(benchmark::State& state, const char* name) {
    const MetricGraph g = bench::fixture(name);
    const double k_hi = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scan_spectrum(g, 1.0, k_hi));
}
BENCHMARK_CAPTURE(BM_ScanSpectrum, interval, "interval")->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ScanSpectrum, star3_equilateral, "star3_equilateral")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ScanSpectrum, delta_star, "delta_star")->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ScanSpectrum, smooth, "smooth")->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Multiplicity(benchmark::State& state) {
    const MetricGraph g = bench::fixture("star3_equilateral");
    for (auto _ : state) benchmark::DoNotOptimize(multiplicity(g, 2.0, 0.1));
}
BENCHMARK(BM_Multiplicity)->Unit(benchmark::kMicrosecond);
