#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "qgraph/edge_solver.hpp"

using namespace qgraph;

static void BM_SolveSmoothEdge(benchmark::State& state) {
    const MetricGraph g = bench::fixture("smooth");
    const double k = static_cast<double>(state.range(0));
    const bool want_dk = state.range(1) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(solve_edge(g, 0, Complex(k), want_dk));
}
BENCHMARK(BM_SolveSmoothEdge)->ArgsProduct({{5, 20, 80}, {0, 1}});

static void BM_AllTransitions(benchmark::State& state) {
    const MetricGraph g = bench::fixture(state.range(0) ? "smooth" : "delta_star");
    for (auto _ : state) benchmark::DoNotOptimize(all_transitions(g, Complex(12.5), true));
}
BENCHMARK(BM_AllTransitions)->Arg(0)->Arg(1);
