#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgraph/edge_solver.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

/// One S-step: start on directed edge `edge`, either cross it (transmission) or
/// bounce back at its midpoint (reflection), then scatter at the vertex reached.
/// On the auxiliary graph this is two steps: vertex -> midpoint -> vertex.
struct OrbitStep {
    DirectedEdge edge = 0;
    bool reflect = false;

    /// Directed edge along which the step arrives at the vertex.
    [[nodiscard]] DirectedEdge via() const { return reflect ? reverse(edge) : edge; }
    /// Dense state index 2*edge + reflect.
    [[nodiscard]] std::size_t state() const { return 2 * edge + (reflect ? 1 : 0); }

    friend bool operator==(const OrbitStep&, const OrbitStep&) = default;
};

/// Equivalence class of closed walks under cyclic shifts, stored as its
/// lexicographically smallest rotation.
struct PeriodicOrbit {
    std::vector<OrbitStep> steps;
    std::size_t primitive_length = 0;

    [[nodiscard]] std::size_t length() const { return steps.size(); }
    [[nodiscard]] std::size_t repetitions() const { return steps.size() / primitive_length; }
    [[nodiscard]] bool transmission_only() const;
    /// Human-readable step list, e.g. "0t 3r 2t" (directed edge, t/r).
    [[nodiscard]] std::string key() const;
};

struct OrbitEnumeration {
    std::vector<PeriodicOrbit> orbits;
    std::size_t n_max = 0;
    /// Set when the class budget was exhausted; the list is then partial.
    bool truncated = false;
};

/// Every class of closed admissible walks with 1..n_max S-steps, ordered by
/// length and then lexicographically. Zero-weight classes are included.
[[nodiscard]] OrbitEnumeration enumerate_orbits(const MetricGraph& g, std::size_t n_max,
                                                std::size_t budget = 2'000'000);

/// The orbit as a closed vertex sequence on the auxiliary graph (first vertex
/// repeated at the end).
[[nodiscard]] std::vector<std::size_t> auxiliary_walk(const MetricGraph& g, const AuxiliaryGraph& aux,
                                                      const PeriodicOrbit& p);

/// Step weight tau = T(via, edge) * sigma(next, via) and its k-derivative.
struct OrbitWeight {
    Complex value;
    Complex derivative;
};

/// Transition-matrix entry T(via, edge) for a step, from the per-edge matrices.
[[nodiscard]] Complex step_transition(const OrbitStep& s, std::span<const EdgeTransition> edges,
                                      bool derivative = false);

/// Product of step weights around the orbit and its k-derivative (product rule).
[[nodiscard]] OrbitWeight orbit_weight(const MetricGraph& g, const PeriodicOrbit& p,
                                       std::span<const EdgeTransition> edges);

/// A_p = (n_p~ / n_p) Im d/dk prod tau.
[[nodiscard]] double orbit_amplitude(const MetricGraph& g, const PeriodicOrbit& p,
                                     std::span<const EdgeTransition> edges);
[[nodiscard]] double orbit_amplitude(const MetricGraph& g, const PeriodicOrbit& p, double k,
                                     const SolverOptions& opts = {});

struct OrbitSumCheck {
    Complex orbit_sum;
    Complex matrix_trace;
    double residual = 0.0;
    std::size_t classes = 0;
};

/// Compares sum over classes with n_p = n of n_p~ prod tau against tr(S(k)^n).
[[nodiscard]] OrbitSumCheck orbit_sum_check(const MetricGraph& g, double k, std::size_t n,
                                            const SolverOptions& opts = {});

}  // namespace qgraph
