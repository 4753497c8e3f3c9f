#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qgraph/orbits.hpp"
#include "qgraph/spectrum.hpp"

namespace qgraph {

/// Gaussian test function exp(-(k - center)^2 / (2 sigma^2)), cut at 8 sigma.
struct TestFunction {
    double center = 0.0;
    double sigma = 1.0;

    [[nodiscard]] double operator()(double k) const {
        const double z = (k - center) / sigma;
        return std::exp(-0.5 * z * z);
    }
    [[nodiscard]] double support_lo() const { return center - 8.0 * sigma; }
    [[nodiscard]] double support_hi() const { return center + 8.0 * sigma; }
};

struct TraceConfig {
    std::size_t n_max = 6;
    /// Minimum Gauss-Legendre node density per unit of k; raised with the
    /// fastest orbit phase when needed.
    double nodes_per_unit = 64.0;
    /// Add the semiclassical (WKB) columns.
    bool wkb = false;
    ScanConfig scan;
};

struct TraceReport {
    TestFunction phi;
    double threshold = 0.0;
    bool threshold_heuristic = false;
    double lhs = 0.0;
    double rhs_weyl = 0.0;
    /// rhs_orbits[n] is the orbit sum over classes with n_p <= n (n = 0..n_max).
    std::vector<double> rhs_orbits;
    std::vector<double> residuals;

    double window_lo = 0.0;
    double window_hi = 0.0;
    std::size_t quadrature_nodes = 0;
    std::size_t quadrature_panels = 0;
    double panel_width = 0.0;

    std::vector<SpectralRoot> roots;
    int eigenvalue_count = 0;
    /// Weyl estimate of the count from the phase increase over the window.
    double weyl_count = 0.0;
    std::size_t orbit_count = 0;
    bool orbits_truncated = false;
    std::vector<std::string> diagnostics;

    struct Semiclassical {
        double rhs_weyl = 0.0;
        std::vector<double> rhs_orbits;
        std::vector<double> residuals;
        std::size_t orbit_count = 0;
    };
    std::optional<Semiclassical> wkb;

    double wall_time = 0.0;
};

/// Smoothed trace formula: sum of phi over the spectrum against the phase term
/// (1/2pi) int phi Theta' and the orbit sums (1/pi) int phi sum A_p.
/// Throws InputError when the test function reaches below the threshold and
/// NumericalError when the root count is inconsistent with the Weyl estimate.
[[nodiscard]] TraceReport trace_check(const MetricGraph& g, const TestFunction& phi, const TraceConfig& cfg = {});

/// Wigner delay dTheta/dk at real k.
[[nodiscard]] double wigner_delay(const MetricGraph& g, double k, const SolverOptions& opts = {});

}  // namespace qgraph
