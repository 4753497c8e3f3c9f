#pragma once

#include <string>
#include <vector>

#include "qgraph/edge_solver.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/scattering.hpp"

namespace qgraph {

struct ScanConfig {
    /// Grid step; 0 selects pi / (4 * total length).
    double step = 0.0;
    /// Bracket width at which root refinement stops.
    double root_tolerance = 1e-9;
    /// Roots closer than this are merged and resolved by winding number.
    double merge_tolerance = 1e-7;
    /// Lower floor on k (avoids the k = 0 degeneracy).
    double floor = 1e-3;
    /// Report roots at or below the threshold K instead of dropping them.
    bool allow_below_threshold = false;
    /// Threshold to use; negative means compute it with subunitarity_threshold.
    double threshold = -1.0;
    unsigned workers = 1;
    SolverOptions solver;
};

struct SpectralRoot {
    double k = 0.0;
    int multiplicity = 1;
    /// |zeta(k)| at the refined root.
    double residual = 0.0;
};

struct SpectrumResult {
    std::vector<SpectralRoot> roots;
    double threshold = 0.0;
    bool threshold_heuristic = false;
    double k_lo = 0.0;
    double k_hi = 0.0;
    double step = 0.0;
    std::size_t evaluations = 0;
    std::vector<std::string> diagnostics;

    /// Sum of multiplicities.
    [[nodiscard]] int count() const;
};

/// Zeros of the secular function on [k_lo, k_hi] with multiplicities.
/// Sign changes of the real secular function are refined by bracketing; touching
/// zeros (even multiplicity) are located at local extrema of zeta and confirmed by
/// winding number. Roots at or below the threshold are dropped with a diagnostic.
[[nodiscard]] SpectrumResult scan_spectrum(const MetricGraph& g, double k_lo, double k_hi,
                                           const ScanConfig& cfg = {});

/// Number of zeros of det(I - S) inside the square of half-width radius centred
/// at k0, from the argument change along the upper half of the contour and
/// Schwarz reflection. Throws NumericalError when the contour passes too close to
/// a zero and InputError when k0 is not above the threshold.
[[nodiscard]] int multiplicity(const MetricGraph& g, double k0, double radius, const SolverOptions& opts = {},
                               double threshold = 0.0);

/// Winding number of det(I - S) around the full rectangle [a, b] x [-h, h]
/// (both halves evaluated directly, no reflection).
[[nodiscard]] int winding_number_full(const MetricGraph& g, double a, double b, double h,
                                      const SolverOptions& opts = {});

/// Winding number over the rectangle [a, b] x [-h, h] using the upper half and
/// reflection.
[[nodiscard]] int winding_number(const MetricGraph& g, double a, double b, double h, const SolverOptions& opts = {});

}  // namespace qgraph
