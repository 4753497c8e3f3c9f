#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "qgraph/edge_solver.hpp"
#include "qgraph/orbits.hpp"

using namespace qgraph;

static void BM_EnumerateOrbits(benchmark::State& state, const char* name) {
    const MetricGraph g = bench::fixture(name);
    const auto n_max = static_cast<std::size_t>(state.range(0));
    std::size_t count = 0;
    for (auto _ : state) {
        const OrbitEnumeration e = enumerate_orbits(g, n_max);
        count = e.orbits.size();
        benchmark::DoNotOptimize(count);
    }
    state.counters["orbits"] = static_cast<double>(count);
}
BENCHMARK_CAPTURE(BM_EnumerateOrbits, star3, "star3")->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EnumerateOrbits, triangle, "triangle")->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_OrbitAmplitudes(benchmark::State& state) {
    const MetricGraph g = bench::fixture("smooth");
    const OrbitEnumeration e = enumerate_orbits(g, 6);
    const auto edges = all_transitions(g, Complex(14.0), true);
    for (auto _ : state) {
        double sum = 0.0;
        for (const auto& p : e.orbits) sum += orbit_amplitude(g, p, edges);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_OrbitAmplitudes);
