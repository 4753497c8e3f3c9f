#include "qgraph/edge_solver.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/error.hpp"
#include "qgraph/ode.hpp"

namespace qgraph {

namespace {

// Solution state: value, x-derivative, and their k-derivatives.
struct State {
    Complex psi;
    Complex dpsi;
    Complex k_psi;
    Complex k_dpsi;
};

// Propagation over a segment of length x with constant potential c:
// psi(x) = C psi0 + Sq dpsi0, psi'(x) = -q^2 Sq psi0 + C dpsi0, q^2 = k^2 - c.
void propagate_constant(State& s, Complex k, double c, double x, bool want_dk) {
    if (x == 0.0) return;
    const Complex q2 = k * k - c;
    const Complex q = std::sqrt(q2);
    const Complex z = q2 * (x * x);
    Complex C, Sq, D;  // D = (x C - Sq) / q^2
    if (std::abs(z) < 1e-6) {
        C = 1.0 - z / 2.0 + z * z / 24.0;
        Sq = x * (1.0 - z / 6.0 + z * z / 120.0);
        D = x * x * x * (-1.0 / 3.0 + z / 30.0 - z * z / 840.0);
    } else {
        C = std::cos(q * x);
        Sq = std::sin(q * x) / q;
        D = (x * C - Sq) / q2;
    }
    const Complex psi = C * s.psi + Sq * s.dpsi;
    const Complex dpsi = -q2 * Sq * s.psi + C * s.dpsi;
    if (want_dk) {
        const Complex dC = -k * x * Sq;
        const Complex dSq = k * D;
        const Complex dQ = -k * (Sq + x * C);  // d/dk of -q^2 Sq
        const Complex k_psi = C * s.k_psi + Sq * s.k_dpsi + dC * s.psi + dSq * s.dpsi;
        const Complex k_dpsi = -q2 * Sq * s.k_psi + C * s.k_dpsi + dQ * s.psi + dC * s.dpsi;
        s.k_psi = k_psi;
        s.k_dpsi = k_dpsi;
    }
    s.psi = psi;
    s.dpsi = dpsi;
}

// Analytic path: piecewise-constant potential with at most one delta jump.
State propagate_analytic(const Potential& w, Orientation orientation, double length, Complex k, State s,
                         bool want_dk, double x_end) {
    if (w.is_delta()) {
        const DeltaPotential d = oriented_delta(w, orientation, length);
        if (x_end < d.position) {
            propagate_constant(s, k, 0.0, x_end, want_dk);
            return s;
        }
        // psi' jumps by D psi(x0); a delta at x_end is included
        propagate_constant(s, k, 0.0, d.position, want_dk);
        s.dpsi += d.strength * s.psi;
        s.k_dpsi += d.strength * s.k_psi;
        propagate_constant(s, k, 0.0, x_end - d.position, want_dk);
        return s;
    }
    const double c = w.is_constant() ? std::get<ConstantPotential>(w.variant()).value : 0.0;
    propagate_constant(s, k, c, x_end, want_dk);
    return s;
}

std::vector<double> monitor_points(double length, int count) {
    std::vector<double> xs;
    for (int i = 1; i <= count; ++i) xs.push_back(length * i / (count + 1));
    return xs;
}

template <std::size_t N, class Rhs, class Observer>
std::size_t run_ode(Rhs&& rhs, double length, OdeState<N>& y, std::span<const double> checkpoints, Observer&& obs,
                    const SolverOptions& opts) {
    OdeOptions o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;
    o.max_steps = opts.max_steps;
    const auto stats = integrate_dopri5<N>(rhs, 0.0, length, y, checkpoints, obs, o);
    return stats.accepted + stats.rejected;
}

// w(x) on the directed edge for the ODE right-hand side
struct PointwisePotential {
    const Potential* w;
    Orientation orientation;
    double length;
    double operator()(double x) const { return eval_oriented(*w, orientation, length, x); }
};

// Smooth potentials are integrated in the interaction picture
// psi = a e^{-ikx} + b e^{ikx}, psi' = ik(-a e^{-ikx} + b e^{ikx}), which removes
// the free oscillation:  a' = -c (a + b E),  b' = c (a / E + b),  c = w / (2ik),
// E = e^{2ikx}. The k-derivatives (a_k, b_k) follow by differentiating these.
// State layout per solution: a, b[, a_k, b_k]; plus then minus when both are needed.
template <bool want_dk>
struct InteractionRhs {
    PointwisePotential pot;
    Complex k;
    std::size_t solutions;

    template <class State>
    void operator()(double x, const State& y, State& dy) const {
        const Complex c = pot(x) / (2.0 * I * k);
        const Complex E = std::exp(2.0 * I * k * x);
        const Complex Einv = 1.0 / E;
        constexpr std::size_t stride = want_dk ? 4 : 2;
        for (std::size_t j = 0; j < solutions; ++j) {
            const std::size_t o = j * stride;
            const Complex a = y[o], b = y[o + 1];
            dy[o] = -c * (a + b * E);
            dy[o + 1] = c * (a * Einv + b);
            if constexpr (want_dk) {
                const Complex ak = y[o + 2], bk = y[o + 3];
                const Complex dc = -c / k;
                dy[o + 2] = -dc * (a + b * E) - c * (ak + bk * E + b * (2.0 * I * x) * E);
                dy[o + 3] = dc * (a * Einv + b) + c * (ak * Einv - a * (2.0 * I * x) * Einv + bk);
            }
        }
    }
};

struct Reconstructed {
    Complex psi, dpsi, k_psi, k_dpsi;
};

Reconstructed reconstruct(Complex k, double x, Complex a, Complex b, Complex ak = 0.0, Complex bk = 0.0) {
    const Complex em = std::exp(-I * k * x), ep = std::exp(I * k * x);
    const Complex plus = a * em + b * ep;
    const Complex diff = -a * em + b * ep;
    Reconstructed r;
    r.psi = plus;
    r.dpsi = I * k * diff;
    r.k_psi = ak * em + bk * ep + I * x * diff;
    r.k_dpsi = I * diff + I * k * (-ak * em + bk * ep) - k * x * plus;
    return r;
}

template <std::size_t N, bool want_dk>
EdgeSolution integrate_interaction(const PointwisePotential& pot, double length, Complex k, bool real_k,
                                   const SolverOptions& opts) {
    constexpr std::size_t stride = want_dk ? 4 : 2;
    const InteractionRhs<want_dk> rhs{pot, k, N / stride};
    const Complex two_ik = 2.0 * I * k;
    OdeState<N> y{};
    y[0] = 1.0;  // plus: a = 1, b = 0
    if constexpr (N >= 2 * stride) y[stride + 1] = 1.0;  // minus: a = 0, b = 1

    auto solution_at = [&](double x, const OdeState<N>& s, std::size_t o) {
        if constexpr (want_dk) return reconstruct(k, x, s[o], s[o + 1], s[o + 2], s[o + 3]);
        else return reconstruct(k, x, s[o], s[o + 1]);
    };
    auto pair_at = [&](double x, const OdeState<N>& s) {
        const Reconstructed p = solution_at(x, s, 0);
        Reconstructed m;
        if (real_k) {
            m = {std::conj(p.psi), std::conj(p.dpsi), std::conj(p.k_psi), std::conj(p.k_dpsi)};
        } else if constexpr (N >= 2 * stride) {
            m = solution_at(x, s, stride);
        }
        return std::pair{p, m};
    };

    EdgeSolution sol;
    sol.k = k;
    sol.has_dk = want_dk;
    auto obs = [&](double x, const OdeState<N>& s) {
        const auto [p, m] = pair_at(x, s);
        sol.max_wronskian_defect =
            std::max(sol.max_wronskian_defect, std::abs(p.psi * m.dpsi - p.dpsi * m.psi - two_ik));
    };
    const auto checkpoints = monitor_points(length, opts.wronskian_checkpoints);
    sol.ode_steps = run_ode<N>(rhs, length, y, checkpoints, obs, opts);

    const auto [p, m] = pair_at(length, y);
    sol.psi_plus = p.psi;
    sol.dpsi_plus = p.dpsi;
    sol.psi_minus = m.psi;
    sol.dpsi_minus = m.dpsi;
    if (want_dk) {
        sol.dk_psi_plus = p.k_psi;
        sol.dk_dpsi_plus = p.k_dpsi;
        sol.dk_psi_minus = m.k_psi;
        sol.dk_dpsi_minus = m.k_dpsi;
    }
    sol.wronskian = sol.psi_plus * sol.dpsi_minus - sol.dpsi_plus * sol.psi_minus;
    sol.max_wronskian_defect = std::max(sol.max_wronskian_defect, std::abs(sol.wronskian - two_ik));
    return sol;
}

EdgeSolution solve_smooth(const Potential& w, Orientation orientation, double length, Complex k, bool want_dk,
                          const SolverOptions& opts) {
    const PointwisePotential pot{&w, orientation, length};
    // for real k the minus solution is the conjugate of the plus solution
    if (k.imag() == 0.0) {
        return want_dk ? integrate_interaction<4, true>(pot, length, k, true, opts)
                       : integrate_interaction<2, false>(pot, length, k, true, opts);
    }
    return want_dk ? integrate_interaction<8, true>(pot, length, k, false, opts)
                   : integrate_interaction<4, false>(pot, length, k, false, opts);
}

}  // namespace

EdgeSolution solve_oriented(const Potential& w, Orientation orientation, double length, Complex k, bool want_dk,
                            const SolverOptions& opts) {
    if (k == Complex(0.0)) {
        throw InputError("k = 0: the normalized solutions psi+ and psi- coincide");
    }
    if (w.is_smooth()) return solve_smooth(w, orientation, length, k, want_dk, opts);

    const State plus =
        propagate_analytic(w, orientation, length, k, State{1.0, -I * k, 0.0, -I}, want_dk, length);
    const State minus = propagate_analytic(w, orientation, length, k, State{1.0, I * k, 0.0, I}, want_dk, length);
    EdgeSolution sol;
    sol.k = k;
    sol.psi_plus = plus.psi;
    sol.dpsi_plus = plus.dpsi;
    sol.psi_minus = minus.psi;
    sol.dpsi_minus = minus.dpsi;
    sol.has_dk = want_dk;
    if (want_dk) {
        sol.dk_psi_plus = plus.k_psi;
        sol.dk_dpsi_plus = plus.k_dpsi;
        sol.dk_psi_minus = minus.k_psi;
        sol.dk_dpsi_minus = minus.k_dpsi;
    }
    sol.wronskian = sol.psi_plus * sol.dpsi_minus - sol.dpsi_plus * sol.psi_minus;
    sol.max_wronskian_defect = std::abs(sol.wronskian - 2.0 * I * k);
    return sol;
}

EdgeSolution solve_edge(const MetricGraph& g, DirectedEdge d, Complex k, bool want_dk, const SolverOptions& opts) {
    return solve_oriented(g.potential(d), orientation_of(d), g.length(d), k, want_dk, opts);
}

std::vector<ProfilePoint> solution_profile(const Potential& w, Orientation orientation, double length, Complex k,
                                           Complex psi0, Complex dpsi0, std::span<const double> xs,
                                           const SolverOptions& opts) {
    std::vector<ProfilePoint> out;
    out.reserve(xs.size());
    if (w.is_analytic()) {
        for (double x : xs) {
            const State s = propagate_analytic(w, orientation, length, k, State{psi0, dpsi0, 0.0, 0.0}, false, x);
            out.push_back({x, s.psi, s.dpsi});
        }
        return out;
    }
    const PointwisePotential pot{&w, orientation, length};
    const Complex k2 = k * k;
    auto rhs = [&](double x, const OdeState<2>& y, OdeState<2>& dy) {
        dy[0] = y[1];
        dy[1] = (pot(x) - k2) * y[0];
    };
    std::vector<double> interior;
    bool at_zero = false;
    for (double x : xs) {
        if (x <= 0.0) at_zero = true;
        else interior.push_back(x);
    }
    if (at_zero) out.push_back({0.0, psi0, dpsi0});
    OdeState<2> y{psi0, dpsi0};
    const double end = interior.empty() ? 0.0 : interior.back();
    auto obs = [&](double x, const OdeState<2>& s) {
        if (!out.empty() && out.back().x == x) return;
        out.push_back({x, s[0], s[1]});
    };
    run_ode<2>(rhs, end, y, interior, obs, opts);
    return out;
}

EdgeTransition assemble_transition(const EdgeSolution& fwd, const EdgeSolution& rev, Complex k) {
    // Boundary data of the reversed orientation at L, and W of both pairs.
    const Complex P = rev.psi_plus, dP = rev.dpsi_plus;
    const Complex M = rev.psi_minus, dM = rev.dpsi_minus;
    const Complex ik = I * k;

    const Complex den = dP - ik * P;
    const double scale = std::abs(dP) + std::abs(ik * P);
    if (std::abs(den) < 1e-12 * scale) {
        throw SingularPointError("transition matrix denominator vanishes", k.real(), k.imag());
    }
    const Complex n11 = rev.wronskian;
    const Complex n12 = dP + ik * P;
    const Complex n21 = dM - ik * M;
    const Complex n22 = fwd.wronskian;

    EdgeTransition out;
    out.t << -n11 / den, -n12 / den, -n21 / den, -n22 / den;

    if (fwd.has_dk && rev.has_dk) {
        const Complex kP = rev.dk_psi_plus, kdP = rev.dk_dpsi_plus;
        const Complex kM = rev.dk_psi_minus, kdM = rev.dk_dpsi_minus;
        const Complex dden = kdP - I * P - ik * kP;
        const Complex dn11 = kP * dM + P * kdM - kdP * M - dP * kM;
        const Complex dn12 = kdP + I * P + ik * kP;
        const Complex dn21 = kdM - I * M - ik * kM;
        const Complex dn22 = fwd.dk_psi_plus * fwd.dpsi_minus + fwd.psi_plus * fwd.dk_dpsi_minus -
                             fwd.dk_dpsi_plus * fwd.psi_minus - fwd.dpsi_plus * fwd.dk_psi_minus;
        auto quotient = [&](Complex n, Complex dn) { return -(dn * den - n * dden) / (den * den); };
        out.dt << quotient(n11, dn11), quotient(n12, dn12), quotient(n21, dn21), quotient(n22, dn22);
        out.has_dk = true;
    }
    return out;
}

EdgeTransition edge_transition(const MetricGraph& g, EdgeIndex e, Complex k, bool want_dk,
                               const SolverOptions& opts) {
    const DirectedEdge d = forward_of(e);
    const EdgeSolution fwd = solve_edge(g, d, k, want_dk, opts);
    const EdgeSolution rev = solve_edge(g, reverse(d), k, want_dk, opts);
    return assemble_transition(fwd, rev, k);
}

Mat2 transition_matrix(const MetricGraph& g, EdgeIndex e, Complex k, const SolverOptions& opts) {
    return edge_transition(g, e, k, false, opts).t;
}

Mat2 transition_matrix_dk(const MetricGraph& g, EdgeIndex e, Complex k, const SolverOptions& opts) {
    return edge_transition(g, e, k, true, opts).dt;
}

std::vector<EdgeTransition> all_transitions(const MetricGraph& g, Complex k, bool want_dk,
                                            const SolverOptions& opts) {
    std::vector<EdgeTransition> out;
    out.reserve(g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) out.push_back(edge_transition(g, e, k, want_dk, opts));
    return out;
}

std::array<Complex, 2> eigenvalues(const Mat2& m) {
    const Complex half_trace = 0.5 * (m(0, 0) + m(1, 1));
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex root = std::sqrt(half_trace * half_trace - det);
    return {half_trace + root, half_trace - root};
}

SubunitarityCheck verify_subunitary(const MetricGraph& g, EdgeIndex e, double k, double eps,
                                    const SolverOptions& opts) {
    if (!(eps > 0.0)) throw InputError("verify_subunitary needs eps > 0");
    const Mat2 t = transition_matrix(g, e, Complex(k, eps), opts);
    const auto mu = eigenvalues(t);
    SubunitarityCheck out;
    out.max_modulus = std::max(std::abs(mu[0]), std::abs(mu[1]));
    out.subunitary = out.max_modulus <= 1.0;
    return out;
}

double delta_threshold(double strength, double length) {
    if (strength >= 0.0) return 0.0;
    return std::sqrt(std::max(0.0, -strength / length - strength * strength / 4.0));
}

ThresholdEstimate subunitarity_threshold(const MetricGraph& g, const SolverOptions& opts) {
    ThresholdEstimate est;
    constexpr std::array<double, 4> eps_grid{1e-4, 1e-3, 1e-2, 1e-1};
    constexpr int run_length = 32;
    constexpr int budget = 4096;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        double K = 0.0;
        if (edge.potential.is_delta()) {
            K = delta_threshold(std::get<DeltaPotential>(edge.potential.variant()).strength, edge.length);
        } else if (!edge.potential.is_zero()) {
            const PotentialNorms norms = potential_norms(edge.potential, edge.length);
            const double start = std::max(std::sqrt(norms.sup_positive), 1e-3);
            const double step = pi / (8.0 * edge.length);
            int passing = 0;
            int j = 0;
            for (; j < budget && passing < run_length; ++j) {
                const double k = start + j * step;
                bool ok = true;
                for (double eps : eps_grid) {
                    try {
                        if (!verify_subunitary(g, e, k, eps, opts).subunitary) {
                            ok = false;
                            break;
                        }
                    } catch (const SingularPointError&) {
                        ok = false;
                        break;
                    }
                }
                passing = ok ? passing + 1 : 0;
            }
            if (passing < run_length) {
                throw NumericalError("no subunitarity threshold found for edge '" + edge.id + "'");
            }
            K = start + (j - run_length) * step;
            if (edge.potential.is_smooth()) est.heuristic = true;
        }
        est.per_edge.push_back(K);
        est.K = std::max(est.K, K);
    }
    return est;
}

}  // namespace qgraph
