#include "qgraph/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/LU>

#include "qgraph/error.hpp"
#include "qgraph/parallel.hpp"

namespace qgraph {

double sigma_entry(const MetricGraph& g, DirectedEdge d, DirectedEdge d_prime) {
    const VertexIndex v = g.origin(d);
    if (g.terminus(d_prime) != v) return 0.0;
    const double transmit = 2.0 / static_cast<double>(g.degree(v));
    return d_prime == reverse(d) ? transmit - 1.0 : transmit;
}

MatrixXr vertex_sigma(const MetricGraph& g, VertexIndex v) {
    const auto out = g.outgoing(v);
    const auto in = g.incoming(v);
    MatrixXr s(out.size(), in.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < in.size(); ++j) s(i, j) = sigma_entry(g, out[i], in[j]);
    }
    return s;
}

MatrixXr sigma_matrix(const MetricGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.directed_count());
    MatrixXr s = MatrixXr::Zero(n, n);
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        for (DirectedEdge d : g.outgoing(v)) {
            for (DirectedEdge dp : g.incoming(v)) s(d, dp) = sigma_entry(g, d, dp);
        }
    }
    return s;
}

MatrixXc block_transition(std::span<const EdgeTransition> edges, bool derivative) {
    const auto n = static_cast<Eigen::Index>(2 * edges.size());
    MatrixXc T = MatrixXc::Zero(n, n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Mat2& t = derivative ? edges[e].dt : edges[e].t;
        const auto a = static_cast<Eigen::Index>(2 * e);
        T(a, a) = t(1, 1);
        T(a + 1, a + 1) = t(0, 0);
        T(a, a + 1) = t(1, 0);
        T(a + 1, a) = t(0, 1);
    }
    return T;
}

UnitaryAssembly assemble_S(const MetricGraph& g, Complex k, bool want_dk, const SolverOptions& opts) {
    UnitaryAssembly out;
    out.k = k;
    out.sigma = sigma_matrix(g);
    out.edges = all_transitions(g, k, want_dk, opts);
    out.T = block_transition(out.edges);
    out.S = out.sigma.cast<Complex>() * out.T;
    if (want_dk) {
        out.dT = block_transition(out.edges, true);
        out.dS = out.sigma.cast<Complex>() * *out.dT;
    }
    return out;
}

double seed_phase(const MetricGraph::Edge& edge, Complex k) {
    const double kr = k.real();
    const double L = edge.length;
    return std::visit(
        [&](const auto& w) -> double {
            using W = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<W, DeltaPotential>) {
                return 2.0 * kr * L - 2.0 * std::atan(w.strength / (2.0 * kr));
            } else if constexpr (std::is_same_v<W, ConstantPotential>) {
                return 2.0 * std::sqrt(Complex(kr * kr - w.value)).real() * L;
            } else {
                return 2.0 * kr * L;
            }
        },
        edge.potential.variant());
}

BranchState::BranchState(const MetricGraph& g) : phases_(g.edge_count(), 0.0) {}

double BranchState::advance(const MetricGraph& g, Complex k, std::span<const Complex> det_t) {
    if (phases_.size() != det_t.size()) phases_.assign(det_t.size(), 0.0);
    if (!initialized_) {
        for (std::size_t e = 0; e < det_t.size(); ++e) {
            const double ref = seed_phase(g.edge(e), k);
            phases_[e] = ref + wrap_angle(std::arg(det_t[e]) - ref);
        }
        initialized_ = true;
        return theta();
    }
    std::vector<double> next(phases_.size());
    for (std::size_t e = 0; e < det_t.size(); ++e) {
        const double step = wrap_angle(std::arg(det_t[e]) - phases_[e]);
        if (std::abs(step) > max_step) {
            throw PhaseStepError("phase of det t jumps by " + std::to_string(step) + " on edge '" + g.edge(e).id +
                                 "' at k = " + std::to_string(k.real()) + "; refine the k grid");
        }
        next[e] = phases_[e] + step;
    }
    phases_ = std::move(next);
    return theta();
}

double BranchState::theta() const {
    double sum = 0.0;
    for (double p : phases_) sum += p;
    return sum;
}

int sigma_determinant_sign(const MetricGraph& g) {
    const double det = sigma_matrix(g).partialPivLu().determinant();
    return det < 0.0 ? -1 : 1;
}

namespace {

std::vector<Complex> edge_determinants(std::span<const EdgeTransition> edges) {
    std::vector<Complex> dets;
    dets.reserve(edges.size());
    for (const auto& t : edges) dets.push_back(t.t.determinant());
    return dets;
}

}  // namespace

SecularValue secular(const MetricGraph& g, const UnitaryAssembly& a, BranchState& branch) {
    SecularValue out;
    out.k = a.k;
    const auto dets = edge_determinants(a.edges);
    out.theta = branch.advance(g, a.k, dets);
    out.det_s_phase = out.theta + (sigma_determinant_sign(g) < 0 ? pi : 0.0);
    const auto n = a.S.rows();
    const MatrixXc m = MatrixXc::Identity(n, n) - a.S;
    out.det_i_minus_s = m.partialPivLu().determinant();
    double log_modulus = 0.0;
    for (const Complex& d : dets) log_modulus += std::log(std::abs(d));
    out.zeta = std::exp(Complex(-0.5 * log_modulus, -0.5 * out.det_s_phase)) * out.det_i_minus_s;
    return out;
}

SecularValue secular(const MetricGraph& g, Complex k, BranchState& branch, const SolverOptions& opts) {
    return secular(g, assemble_S(g, k, false, opts), branch);
}

double theta(const MetricGraph& g, Complex k, BranchState& branch, const SolverOptions& opts) {
    const auto edges = all_transitions(g, k, false, opts);
    return branch.advance(g, k, edge_determinants(edges));
}

Complex log_det_t_derivative(std::span<const EdgeTransition> edges) {
    Complex sum = 0.0;
    for (const auto& e : edges) {
        if (!e.has_dk) throw NumericalError("log_det_t_derivative needs k-derivatives of t");
        sum += (e.t.inverse() * e.dt).trace();
    }
    return sum;
}

double theta_derivative(const MetricGraph& g, double k, const SolverOptions& opts) {
    const auto edges = all_transitions(g, Complex(k), true, opts);
    return (-I * log_det_t_derivative(edges)).real();
}

std::vector<SecularSample> secular_sweep(const MetricGraph& g, std::span<const double> ks, const SolverOptions& opts,
                                         unsigned workers) {
    std::vector<UnitaryAssembly> snapshots(ks.size());
    parallel_for(ks.size(), workers, [&](std::size_t i) { snapshots[i] = assemble_S(g, Complex(ks[i]), false, opts); });
    BranchState branch(g);
    std::vector<SecularSample> out;
    out.reserve(ks.size());
    for (const auto& a : snapshots) {
        const SecularValue v = secular(g, a, branch);
        out.push_back({a.k.real(), v.zeta, v.theta});
    }
    return out;
}

}  // namespace qgraph
