#pragma once

#include <cstddef>
#include <vector>

namespace qgraph {

/// Nodes and weights of a quadrature rule on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t panels = 0;
    double panel_width = 0.0;

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

/// Composite 20-point Gauss-Legendre rule on [a, b] with panels no wider than
/// max_panel_width.
[[nodiscard]] QuadratureRule composite_gauss_legendre(double a, double b, double max_panel_width);

inline constexpr std::size_t gauss_points_per_panel = 20;

}  // namespace qgraph
