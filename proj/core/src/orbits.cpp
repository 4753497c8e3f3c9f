#include "qgraph/orbits.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <sstream>

#include "qgraph/error.hpp"
#include "qgraph/scattering.hpp"

namespace qgraph {

bool PeriodicOrbit::transmission_only() const {
    return std::none_of(steps.begin(), steps.end(), [](const OrbitStep& s) { return s.reflect; });
}

std::string PeriodicOrbit::key() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out << ' ';
        out << steps[i].edge << (steps[i].reflect ? 'r' : 't');
    }
    return out.str();
}

namespace {

OrbitStep from_state(std::size_t s) { return {s / 2, (s % 2) == 1}; }

// Successor states of each state, ascending.
std::vector<std::vector<std::size_t>> successor_table(const MetricGraph& g) {
    std::vector<std::vector<std::size_t>> next(2 * g.directed_count());
    for (std::size_t s = 0; s < next.size(); ++s) {
        const VertexIndex v = g.terminus(from_state(s).via());
        for (DirectedEdge a : g.outgoing(v)) {
            next[s].push_back(2 * a);
            next[s].push_back(2 * a + 1);
        }
        std::sort(next[s].begin(), next[s].end());
    }
    return next;
}

bool is_least_rotation(const std::vector<std::size_t>& seq) {
    const std::size_t n = seq.size();
    for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = seq[(r + i) % n], b = seq[i];
            if (a < b) return false;
            if (a > b) break;
        }
    }
    return true;
}

std::size_t primitive_period(const std::vector<std::size_t>& seq) {
    const std::size_t n = seq.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p) continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i) periodic = seq[i] == seq[i - p];
        if (periodic) return p;
    }
    return n;
}

}  // namespace

OrbitEnumeration enumerate_orbits(const MetricGraph& g, std::size_t n_max, std::size_t budget) {
    if (n_max == 0) throw InputError("enumerate_orbits needs n_max >= 1");
    OrbitEnumeration out;
    out.n_max = n_max;
    const auto next = successor_table(g);
    const std::size_t states = next.size();

    std::vector<std::vector<PeriodicOrbit>> by_length(n_max + 1);
    std::size_t total = 0;
    std::vector<std::size_t> seq;
    // Depth-first over walks whose first state is the minimum of the walk.
    auto closes = [&](std::size_t last, std::size_t first) {
        return std::binary_search(next[last].begin(), next[last].end(), first);
    };
    std::function<void(std::size_t)> dfs = [&](std::size_t first) {
        if (out.truncated) return;
        const std::size_t last = seq.back();
        if (closes(last, first) && is_least_rotation(seq)) {
            PeriodicOrbit p;
            for (std::size_t s : seq) p.steps.push_back(from_state(s));
            p.primitive_length = primitive_period(seq);
            by_length[seq.size()].push_back(std::move(p));
            if (++total >= budget) {
                out.truncated = true;
                return;
            }
        }
        if (seq.size() == n_max) return;
        for (std::size_t s : next[last]) {
            if (s < first) continue;
            seq.push_back(s);
            dfs(first);
            seq.pop_back();
            if (out.truncated) return;
        }
    };
    for (std::size_t first = 0; first < states && !out.truncated; ++first) {
        seq.assign(1, first);
        dfs(first);
    }
    for (auto& group : by_length) {
        std::sort(group.begin(), group.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
            return std::lexicographical_compare(a.steps.begin(), a.steps.end(), b.steps.begin(), b.steps.end(),
                                                [](const OrbitStep& x, const OrbitStep& y) {
                                                    return x.state() < y.state();
                                                });
        });
        for (auto& p : group) out.orbits.push_back(std::move(p));
    }
    return out;
}

std::vector<std::size_t> auxiliary_walk(const MetricGraph& g, const AuxiliaryGraph& aux, const PeriodicOrbit& p) {
    std::vector<std::size_t> walk;
    for (const OrbitStep& s : p.steps) {
        walk.push_back(g.origin(s.edge));
        walk.push_back(aux.midpoint_of(edge_of(s.edge)));
    }
    if (!p.steps.empty()) walk.push_back(g.origin(p.steps.front().edge));
    return walk;
}

Complex step_transition(const OrbitStep& s, std::span<const EdgeTransition> edges, bool derivative) {
    const EdgeTransition& et = edges[edge_of(s.edge)];
    const Mat2& t = derivative ? et.dt : et.t;
    const bool forward = (s.edge & 1U) == 0;
    // T(2e,2e) = t22, T(2e+1,2e) = t12, T(2e+1,2e+1) = t11, T(2e,2e+1) = t21
    if (forward) return s.reflect ? t(0, 1) : t(1, 1);
    return s.reflect ? t(1, 0) : t(0, 0);
}

OrbitWeight orbit_weight(const MetricGraph& g, const PeriodicOrbit& p, std::span<const EdgeTransition> edges) {
    const std::size_t n = p.steps.size();
    std::vector<Complex> w(n), dw(n);
    const bool want_dk = !edges.empty() && edges.front().has_dk;
    for (std::size_t i = 0; i < n; ++i) {
        const OrbitStep& s = p.steps[i];
        const double sigma = sigma_entry(g, p.steps[(i + 1) % n].edge, s.via());
        w[i] = step_transition(s, edges) * sigma;
        dw[i] = want_dk ? step_transition(s, edges, true) * sigma : Complex(0.0);
    }
    // forward product rule: (value, derivative) accumulated step by step
    OrbitWeight out{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        out.derivative = out.derivative * w[i] + out.value * dw[i];
        out.value *= w[i];
    }
    return out;
}

double orbit_amplitude(const MetricGraph& g, const PeriodicOrbit& p, std::span<const EdgeTransition> edges) {
    if (edges.empty() || !edges.front().has_dk) throw NumericalError("orbit_amplitude needs k-derivatives of t");
    const OrbitWeight w = orbit_weight(g, p, edges);
    return static_cast<double>(p.primitive_length) / static_cast<double>(p.length()) * w.derivative.imag();
}

double orbit_amplitude(const MetricGraph& g, const PeriodicOrbit& p, double k, const SolverOptions& opts) {
    const auto edges = all_transitions(g, Complex(k), true, opts);
    return orbit_amplitude(g, p, edges);
}

OrbitSumCheck orbit_sum_check(const MetricGraph& g, double k, std::size_t n, const SolverOptions& opts) {
    const UnitaryAssembly a = assemble_S(g, Complex(k), false, opts);
    OrbitSumCheck out;
    const auto orbits = enumerate_orbits(g, n);
    if (orbits.truncated) throw NumericalError("orbit budget exhausted before n = " + std::to_string(n));
    for (const auto& p : orbits.orbits) {
        if (p.length() != n) continue;
        out.orbit_sum += static_cast<double>(p.primitive_length) * orbit_weight(g, p, a.edges).value;
        ++out.classes;
    }
    MatrixXc power = MatrixXc::Identity(a.S.rows(), a.S.cols());
    for (std::size_t i = 0; i < n; ++i) power = power * a.S;
    out.matrix_trace = power.trace();
    out.residual = std::abs(out.orbit_sum - out.matrix_trace);
    return out;
}

}  // namespace qgraph
