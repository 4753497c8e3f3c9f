#include "qgraph/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgraph/error.hpp"
#include "qgraph/scattering.hpp"

namespace qgraph {

namespace {

struct Momentum {
    const Potential& w;
    Orientation orientation;
    double length;
    double k;

    double potential(double x) const { return w.is_zero() ? 0.0 : eval_oriented(w, orientation, length, x); }
    double operator()(double x) const { return std::sqrt(k * k - potential(x)); }
};

void check_admissible(const Potential& w, double length, double k, const WkbOptions& opts) {
    if (w.is_delta()) throw InputError("WKB data are not defined for delta potentials");
    if (!(k > 0.0)) throw InputError("WKB needs k > 0");
    const double max_w = w.is_zero() ? 0.0 : potential_norms(w, length).max_value;
    if (k * k <= max_w + opts.margin) {
        throw InputError("turning point: k^2 = " + std::to_string(k * k) + " does not exceed max w + margin = " +
                         std::to_string(max_w + opts.margin));
    }
}

template <class F>
double integrate_adaptive(F&& f, double a, double b, double tolerance) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(f, a, b, 15, tolerance);
}

// s at every point of an ascending grid, accumulated cell by cell.
std::vector<double> cumulative_action(const Momentum& p, std::span<const double> xs) {
    using Rule = boost::math::quadrature::gauss<double, 10>;
    std::vector<double> s(xs.size());
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] > prev) acc += Rule::integrate(p, prev, xs[i]);
        s[i] = acc;
        prev = xs[i];
    }
    return s;
}

}  // namespace

WkbEdgeData wkb_solution(const Potential& w, Orientation orientation, double length, double k,
                         const WkbOptions& opts) {
    check_admissible(w, length, k, opts);
    const Momentum p{w, orientation, length, k};
    WkbEdgeData out;
    out.k = k;
    out.length = length;
    if (w.is_zero()) {
        out.action = k * length;
        out.travel_time = length;
    } else if (w.is_constant()) {
        const double q = p(0.0);
        out.action = q * length;
        out.travel_time = k / q * length;
    } else {
        out.action = integrate_adaptive(p, 0.0, length, opts.tolerance);
        out.travel_time = integrate_adaptive([&](double x) { return k / p(x); }, 0.0, length, opts.tolerance);
    }
    out.p0 = p(0.0);
    out.pL = p(length);
    const double amp = std::sqrt(out.p0 / out.pL);
    out.psi_plus = amp * std::exp(Complex(0.0, -out.action));
    out.psi_minus = std::conj(out.psi_plus);
    // (sqrt(p0/p) e^{-is})' = (-p'/(2p) - i p) psi, with p' = -w'/(2p)
    const double dw = w.is_smooth() ? jet_oriented(w, orientation, length, length).d1 : 0.0;
    const double dp = -dw / (2.0 * out.pL);
    out.dpsi_plus = (-dp / (2.0 * out.pL) - I * out.pL) * out.psi_plus;
    out.dpsi_minus = std::conj(out.dpsi_plus);
    out.derivative_correction = std::abs(out.dpsi_plus - (-I * k * out.psi_plus));
    return out;
}

WkbEdgeData wkb_solution(const MetricGraph& g, DirectedEdge d, double k, const WkbOptions& opts) {
    return wkb_solution(g.potential(d), orientation_of(d), g.length(d), k, opts);
}

std::vector<Complex> wkb_profile(const Potential& w, Orientation orientation, double length, double k,
                                 std::span<const double> xs, const WkbOptions& opts) {
    check_admissible(w, length, k, opts);
    const Momentum p{w, orientation, length, k};
    const auto s = cumulative_action(p, xs);
    const double p0 = p(0.0);
    std::vector<Complex> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::sqrt(p0 / p(xs[i])) * std::exp(Complex(0.0, -s[i]));
    return out;
}

double wkb_chi(const Potential& w, Orientation orientation, double length, double k, double x) {
    if (!w.is_smooth()) return 0.0;
    const Jet2 j = jet_oriented(w, orientation, length, x);
    const double p2 = k * k - j.value;
    return 0.25 * j.d2 / (p2 * p2) + 5.0 / 16.0 * j.d1 * j.d1 / (p2 * p2 * p2);
}

WkbCorrection wkb_correction(const Potential& w, Orientation orientation, double length, double k, int order,
                             const WkbOptions& opts) {
    if (order < 1 || order > 2) throw InputError("wkb_correction supports orders 1 and 2");
    check_admissible(w, length, k, opts);
    const Momentum p{w, orientation, length, k};
    const auto n = static_cast<std::size_t>(std::max(4096.0, std::ceil(256.0 * k * length)));

    WkbCorrection out;
    out.order = order;
    out.x.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.x[i] = length * static_cast<double>(i) / static_cast<double>(n);
    const auto s = cumulative_action(p, out.x);
    std::vector<double> pw(n + 1), chi(n + 1);
    std::vector<Complex> phase(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        pw[i] = p(out.x[i]);
        chi[i] = wkb_chi(w, orientation, length, k, out.x[i]);
        phase[i] = std::exp(Complex(0.0, s[i]));
    }
    const double h = length / static_cast<double>(n);

    std::vector<Complex> previous(n + 1), eta(n + 1);
    for (std::size_t i = 0; i <= n; ++i) previous[i] = std::conj(phase[i]);  // eta_0 = e^{-is}
    out.eta_sum.assign(n + 1, Complex(0.0));
    double previous_sup = 1.0;
    for (int j = 1; j <= order; ++j) {
        // eta_j = -e^{is} int_0^s e^{-2is'} int_0^{s'} e^{is''} chi eta_{j-1} ds'' ds', with ds = p dx
        Complex inner = 0.0, outer = 0.0;
        Complex f_inner_prev = phase[0] * chi[0] * previous[0] * pw[0];
        Complex f_outer_prev = 0.0;
        eta[0] = 0.0;
        double sup = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const Complex f_inner = phase[i] * chi[i] * previous[i] * pw[i];
            inner += 0.5 * h * (f_inner_prev + f_inner);
            f_inner_prev = f_inner;
            const Complex f_outer = std::conj(phase[i] * phase[i]) * inner * pw[i];
            outer += 0.5 * h * (f_outer_prev + f_outer);
            f_outer_prev = f_outer;
            eta[i] = -phase[i] * outer;
            sup = std::max(sup, std::abs(eta[i]));
        }
        for (std::size_t i = 0; i <= n; ++i) out.eta_sum[i] += eta[i];
        out.sup.push_back(sup);
        if (sup >= previous_sup) out.divergent = true;
        previous_sup = sup;
        previous = eta;
    }
    return out;
}

WkbCorrection wkb_correction(const MetricGraph& g, DirectedEdge d, double k, int order, const WkbOptions& opts) {
    return wkb_correction(g.potential(d), orientation_of(d), g.length(d), k, order, opts);
}

Mat2 wkb_transition(const MetricGraph& g, EdgeIndex e, double k, const WkbOptions& opts) {
    const WkbEdgeData data = wkb_solution(g, forward_of(e), k, opts);
    const Complex phase = std::exp(Complex(0.0, data.action));
    Mat2 t;
    t << phase, 0.0, 0.0, phase;
    return t;
}

std::vector<WkbEdgeData> wkb_edges(const MetricGraph& g, double k, const WkbOptions& opts) {
    std::vector<WkbEdgeData> out;
    out.reserve(g.edge_count());
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) out.push_back(wkb_solution(g, forward_of(e), k, opts));
    return out;
}

double wkb_wigner_delay(const MetricGraph& g, double k, const WkbOptions& opts) {
    double sum = 0.0;
    for (const auto& e : wkb_edges(g, k, opts)) sum += 2.0 * e.travel_time;
    return sum;
}

SemiclassicalOrbitData semiclassical_trace_data(const PeriodicOrbit& p, const MetricGraph& g,
                                                std::span<const WkbEdgeData> edges) {
    if (!p.transmission_only()) {
        throw InputError("semiclassical data need a transmission-only orbit; got " + p.key());
    }
    SemiclassicalOrbitData out;
    out.repetitions = p.repetitions();
    double product = 1.0;
    const std::size_t n = p.length();
    for (std::size_t i = 0; i < p.primitive_length; ++i) {
        const OrbitStep& s = p.steps[i];
        const double sigma = sigma_entry(g, p.steps[(i + 1) % n].edge, s.via());
        product *= sigma;
        if (sigma < 0.0) ++out.backscatters;
        const WkbEdgeData& e = edges[edge_of(s.edge)];
        out.action += e.action;
        out.period += e.travel_time;
    }
    out.stability = std::abs(product);
    const double r = static_cast<double>(out.repetitions);
    out.amplitude = out.period * std::pow(out.stability, r) * std::cos((out.action + pi * out.backscatters) * r);
    return out;
}

SemiclassicalOrbitData semiclassical_trace_data(const PeriodicOrbit& p, const MetricGraph& g, double k,
                                                const WkbOptions& opts) {
    const auto edges = wkb_edges(g, k, opts);
    return semiclassical_trace_data(p, g, edges);
}

}  // namespace qgraph
