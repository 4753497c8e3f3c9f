#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "qgraph/scattering.hpp"

using namespace qgraph;

static void BM_SecularReal(benchmark::State& state, const char* name) {
    const MetricGraph g = bench::fixture(name);
    BranchState branch(g);
    double k = 5.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(secular(g, Complex(k), branch));
        k += 1e-3;
    }
}
BENCHMARK_CAPTURE(BM_SecularReal, star3, "star3");
BENCHMARK_CAPTURE(BM_SecularReal, triangle, "triangle");
BENCHMARK_CAPTURE(BM_SecularReal, delta_star, "delta_star");
BENCHMARK_CAPTURE(BM_SecularReal, smooth, "smooth");

static void BM_AssembleS(benchmark::State& state) {
    const MetricGraph g = bench::fixture("smooth");
    const bool want_dk = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(assemble_S(g, Complex(9.0, 0.1), want_dk));
}
BENCHMARK(BM_AssembleS)->Arg(0)->Arg(1);
