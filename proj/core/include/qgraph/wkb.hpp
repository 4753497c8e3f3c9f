#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/orbits.hpp"
#include "qgraph/types.hpp"

namespace qgraph {

struct WkbOptions {
    /// Required gap k^2 - max w.
    double margin = 1.0;
    /// Target accuracy of the action integrals.
    double tolerance = 1e-12;
};

/// WKB data for one directed edge at real k.
struct WkbEdgeData {
    double k = 0.0;
    double length = 0.0;
    /// s = integral of p over the edge.
    double action = 0.0;
    /// integral of k / p over the edge (traversal time).
    double travel_time = 0.0;
    double p0 = 0.0;
    double pL = 0.0;
    Complex psi_plus;
    Complex psi_minus;
    /// Exact derivatives of the WKB functions at L.
    Complex dpsi_plus;
    Complex dpsi_minus;
    /// |(psi_WKB+)'(L) - (-ik psi_WKB+(L))|, the size of the O(1/k) derivative approximation.
    double derivative_correction = 0.0;
};

/// Throws InputError for delta edges and when k^2 <= max w + margin (turning point).
[[nodiscard]] WkbEdgeData wkb_solution(const MetricGraph& g, DirectedEdge d, double k, const WkbOptions& opts = {});
[[nodiscard]] WkbEdgeData wkb_solution(const Potential& w, Orientation orientation, double length, double k,
                                       const WkbOptions& opts = {});

/// psi_WKB+(x) = sqrt(p(0)/p(x)) exp(-i s(x)) at the given ascending points.
[[nodiscard]] std::vector<Complex> wkb_profile(const Potential& w, Orientation orientation, double length, double k,
                                               std::span<const double> xs, const WkbOptions& opts = {});

/// Iterated correction eta_j of the WKB series for psi+ on a uniform x grid.
struct WkbCorrection {
    int order = 0;
    std::vector<double> x;
    /// eta_1 .. eta_order summed, as a function of x (same grid).
    std::vector<Complex> eta_sum;
    /// sup |eta_j| for j = 1..order.
    std::vector<double> sup;
    /// Set when sup |eta_j| >= sup |eta_{j-1}| for some j (sup |eta_0| = 1).
    bool divergent = false;
};

/// Computes eta_1..eta_order (order 1 or 2) by nested cumulative quadrature of the
/// variation-of-constants formula. The grid has max(4096, 256 k L) intervals.
[[nodiscard]] WkbCorrection wkb_correction(const Potential& w, Orientation orientation, double length, double k,
                                           int order, const WkbOptions& opts = {});
[[nodiscard]] WkbCorrection wkb_correction(const MetricGraph& g, DirectedEdge d, double k, int order,
                                           const WkbOptions& opts = {});

/// chi(x) = w''/4 p^-4 + 5/16 w'^2 p^-6.
[[nodiscard]] double wkb_chi(const Potential& w, Orientation orientation, double length, double k, double x);

/// diag(e^{is}, e^{is}) for edge e; reflections are dropped.
[[nodiscard]] Mat2 wkb_transition(const MetricGraph& g, EdgeIndex e, double k, const WkbOptions& opts = {});

/// Sum over directed edges of the traversal times.
[[nodiscard]] double wkb_wigner_delay(const MetricGraph& g, double k, const WkbOptions& opts = {});

/// Semiclassical data of a transmission-only orbit (primitive part and repetitions).
struct SemiclassicalOrbitData {
    /// |prod sigma| over the primitive orbit.
    double stability = 0.0;
    /// Number of vertex scatterings with sigma < 0 in the primitive orbit.
    int backscatters = 0;
    double action = 0.0;
    double period = 0.0;
    std::size_t repetitions = 1;
    /// T A^r cos((S + pi nu) r).
    double amplitude = 0.0;
};

/// Throws InputError when the orbit contains a midpoint reflection.
[[nodiscard]] SemiclassicalOrbitData semiclassical_trace_data(const PeriodicOrbit& p, const MetricGraph& g, double k,
                                                              const WkbOptions& opts = {});

/// Per-edge WKB data indexed by edge (both orientations share s and the travel time).
[[nodiscard]] std::vector<WkbEdgeData> wkb_edges(const MetricGraph& g, double k, const WkbOptions& opts = {});

/// Same as semiclassical_trace_data with precomputed per-edge data.
[[nodiscard]] SemiclassicalOrbitData semiclassical_trace_data(const PeriodicOrbit& p, const MetricGraph& g,
                                                              std::span<const WkbEdgeData> edges);

}  // namespace qgraph
