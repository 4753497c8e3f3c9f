#include "qgraph/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qgraph/error.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/quadrature.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/wkb.hpp"

namespace qgraph {

double wigner_delay(const MetricGraph& g, double k, const SolverOptions& opts) {
    return theta_derivative(g, k, opts);
}

TraceReport trace_check(const MetricGraph& g, const TestFunction& phi, const TraceConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    if (!(phi.sigma > 0.0)) throw InputError("test function width must be positive");
    TraceReport report;
    report.phi = phi;

    if (cfg.scan.threshold >= 0.0) {
        report.threshold = cfg.scan.threshold;
    } else {
        const ThresholdEstimate est = subunitarity_threshold(g, cfg.scan.solver);
        report.threshold = est.K;
        report.threshold_heuristic = est.heuristic;
    }
    const double lo = phi.support_lo();
    const double hi = phi.support_hi();
    if (lo <= std::max(report.threshold, cfg.scan.floor)) {
        throw InputError("test function support starts at k = " + std::to_string(lo) +
                         ", not above the threshold K = " + std::to_string(report.threshold));
    }
    report.window_lo = lo;
    report.window_hi = hi;

    ScanConfig scan = cfg.scan;
    scan.threshold = report.threshold;
    const SpectrumResult spectrum = scan_spectrum(g, lo, hi, scan);
    report.roots = spectrum.roots;
    report.eigenvalue_count = spectrum.count();
    report.diagnostics = spectrum.diagnostics;
    for (const auto& r : spectrum.roots) report.lhs += r.multiplicity * phi(r.k);

    const OrbitEnumeration orbits =
        cfg.n_max > 0 ? enumerate_orbits(g, cfg.n_max) : OrbitEnumeration{};
    report.orbit_count = orbits.orbits.size();
    report.orbits_truncated = orbits.truncated;
    if (orbits.truncated) report.diagnostics.push_back("orbit enumeration truncated by the class budget");

    const double density =
        std::max(cfg.nodes_per_unit, 8.0 * static_cast<double>(cfg.n_max) * g.max_edge_length());
    const QuadratureRule rule =
        composite_gauss_legendre(lo, hi, static_cast<double>(gauss_points_per_panel) / density);
    report.quadrature_nodes = rule.nodes.size();
    report.quadrature_panels = rule.panels;
    report.panel_width = rule.panel_width;

    std::vector<const PeriodicOrbit*> semiclassical_orbits;
    if (cfg.wkb) {
        for (const auto& p : orbits.orbits) {
            if (p.transmission_only()) semiclassical_orbits.push_back(&p);
        }
    }

    // Per-node integrands: Theta', orbit sums grouped by length, WKB counterparts.
    const std::size_t nodes = rule.nodes.size();
    const std::size_t groups = cfg.n_max + 1;
    std::vector<double> delay(nodes);
    std::vector<double> by_length(nodes * groups, 0.0);
    std::vector<double> delay_wkb(cfg.wkb ? nodes : 0);
    std::vector<double> by_length_wkb(cfg.wkb ? nodes * groups : 0, 0.0);
    parallel_for(nodes, cfg.scan.workers, [&](std::size_t j) {
        const double k = rule.nodes[j];
        const auto edges = all_transitions(g, Complex(k), true, cfg.scan.solver);
        delay[j] = (-I * log_det_t_derivative(edges)).real();
        for (const auto& p : orbits.orbits) by_length[j * groups + p.length()] += orbit_amplitude(g, p, edges);
        if (cfg.wkb) {
            const auto wkb = wkb_edges(g, k);
            double sum = 0.0;
            for (const auto& e : wkb) sum += 2.0 * e.travel_time;
            delay_wkb[j] = sum;
            for (const PeriodicOrbit* p : semiclassical_orbits) {
                by_length_wkb[j * groups + p->length()] += semiclassical_trace_data(*p, g, wkb).amplitude;
            }
        }
    });

    double delta_theta = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const double f = rule.weights[j] * phi(rule.nodes[j]);
        report.rhs_weyl += f * delay[j] / (2.0 * pi);
        delta_theta += rule.weights[j] * delay[j];
    }
    report.weyl_count = delta_theta / (2.0 * pi);
    const double allowed = 2.0 * static_cast<double>(g.edge_count()) + 1.0;
    if (std::abs(report.eigenvalue_count - report.weyl_count) > allowed) {
        throw NumericalError("eigenvalue count " + std::to_string(report.eigenvalue_count) +
                             " in the window is inconsistent with the Weyl estimate " +
                             std::to_string(report.weyl_count));
    }

    auto partial_sums = [&](const std::vector<double>& table) {
        std::vector<double> sums(groups, 0.0);
        for (std::size_t n = 1; n < groups; ++n) {
            double term = 0.0;
            for (std::size_t j = 0; j < nodes; ++j) term += rule.weights[j] * phi(rule.nodes[j]) * table[j * groups + n];
            sums[n] = sums[n - 1] + term / pi;
        }
        return sums;
    };
    report.rhs_orbits = partial_sums(by_length);
    for (double r : report.rhs_orbits) report.residuals.push_back(std::abs(report.lhs - report.rhs_weyl - r));

    if (cfg.wkb) {
        TraceReport::Semiclassical sc;
        sc.orbit_count = semiclassical_orbits.size();
        for (std::size_t j = 0; j < nodes; ++j) {
            sc.rhs_weyl += rule.weights[j] * phi(rule.nodes[j]) * delay_wkb[j] / (2.0 * pi);
        }
        sc.rhs_orbits = partial_sums(by_length_wkb);
        for (double r : sc.rhs_orbits) sc.residuals.push_back(std::abs(report.lhs - sc.rhs_weyl - r));
        report.wkb = std::move(sc);
    }

    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace qgraph
