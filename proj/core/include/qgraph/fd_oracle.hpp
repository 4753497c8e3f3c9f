#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/SparseCore>

#include "qgraph/graph.hpp"

namespace qgraph {

/// Lumped-mass discretization of -psi'' + w psi with Kirchhoff-Neumann vertices:
/// A u = lambda M u with A the stiffness plus potential matrix and M diagonal.
struct DiscretizedGraph {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::VectorXd mass;
    /// Grid intervals per edge.
    std::vector<std::size_t> intervals;
    std::size_t unknowns() const { return static_cast<std::size_t>(mass.size()); }
};

/// Builds the discretization with ceil(L_e / h) intervals on each edge.
/// Throws InputError when h > min L_e / 16.
[[nodiscard]] DiscretizedGraph discretize(const MetricGraph& g, double h);

/// Same with explicit interval counts per edge.
[[nodiscard]] DiscretizedGraph discretize(const MetricGraph& g, const std::vector<std::size_t>& intervals);

/// Symmetric operator M^{-1/2} A M^{-1/2}.
[[nodiscard]] Eigen::SparseMatrix<double> symmetric_operator(const DiscretizedGraph& d);

/// Number of eigenvalues below shift (Sylvester inertia of A - shift M).
[[nodiscard]] std::size_t eigenvalues_below(const DiscretizedGraph& d, double shift);

/// Eigenvalues with indices [first, first + count) in ascending order, by
/// bisection on the inertia count.
[[nodiscard]] std::vector<double> fd_eigenvalues(const DiscretizedGraph& d, std::size_t first, std::size_t count);

struct FdSpectrum {
    /// k = sqrt(lambda) for the smallest nonnegative eigenvalues.
    std::vector<double> k;
    /// Eigenvalues below zero (outside the positive-k band).
    std::vector<double> negative_lambda;
    double h = 0.0;
    std::size_t unknowns = 0;
    bool richardson = false;
};

/// Smallest `count` nonnegative eigenvalues as k values. With Richardson
/// extrapolation the grid is refined to exactly twice the intervals per edge and
/// k = (4 k_{h/2} - k_h) / 3.
[[nodiscard]] FdSpectrum fd_spectrum(const MetricGraph& g, double h, std::size_t count, bool richardson = true);

}  // namespace qgraph
