#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/types.hpp"

namespace qgraph {

struct SolverOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    std::size_t max_steps = 2'000'000;
    /// Interior points at which the Wronskian of the pair is monitored.
    int wronskian_checkpoints = 16;
};

/// Boundary data at x = L of the normalized pair psi+/psi- on one directed edge,
/// psi±(0) = 1, (psi±)'(0) = ∓ik.
struct EdgeSolution {
    Complex k;
    Complex psi_plus;
    Complex dpsi_plus;
    Complex psi_minus;
    Complex dpsi_minus;

    bool has_dk = false;
    Complex dk_psi_plus;
    Complex dk_dpsi_plus;
    Complex dk_psi_minus;
    Complex dk_dpsi_minus;

    /// W(psi+, psi-) = psi+ (psi-)' - (psi+)' psi- evaluated at L.
    Complex wronskian;
    /// max |W(x) - 2ik| over the monitored points (including L).
    double max_wronskian_defect = 0.0;
    std::size_t ode_steps = 0;
};

/// Solves the edge equation -psi'' + w psi = k^2 psi for one orientation.
/// Zero, constant and delta potentials use exact transfer matrices (any complex
/// k); smooth potentials are integrated with adaptive Dormand-Prince, together
/// with the variational system for d/dk when want_dk is set. For real k the
/// minus solution is the conjugate of the plus solution.
/// Throws InputError for k = 0 and NumericalError when the ODE budget is exceeded.
[[nodiscard]] EdgeSolution solve_oriented(const Potential& w, Orientation orientation, double length, Complex k,
                                          bool want_dk, const SolverOptions& opts = {});

[[nodiscard]] EdgeSolution solve_edge(const MetricGraph& g, DirectedEdge d, Complex k, bool want_dk,
                                      const SolverOptions& opts = {});

/// Solution with arbitrary initial data psi(0), psi'(0), sampled at the given
/// ascending points of [0, L].
struct ProfilePoint {
    double x;
    Complex psi;
    Complex dpsi;
};

[[nodiscard]] std::vector<ProfilePoint> solution_profile(const Potential& w, Orientation orientation, double length,
                                                         Complex k, Complex psi0, Complex dpsi0,
                                                         std::span<const double> xs, const SolverOptions& opts = {});

/// 2x2 edge transition matrix t with (a_d, a_dhat) = t (b_dhat, b_d), d = 2e.
/// dt is d t / dk when requested.
struct EdgeTransition {
    Mat2 t;
    Mat2 dt;
    bool has_dk = false;
};

/// Assembles t (and dt) from the boundary data of the two orientations.
/// Throws SingularPointError when the denominator vanishes.
[[nodiscard]] EdgeTransition assemble_transition(const EdgeSolution& forward, const EdgeSolution& reverse_sol,
                                                 Complex k);

[[nodiscard]] EdgeTransition edge_transition(const MetricGraph& g, EdgeIndex e, Complex k, bool want_dk,
                                             const SolverOptions& opts = {});

[[nodiscard]] Mat2 transition_matrix(const MetricGraph& g, EdgeIndex e, Complex k, const SolverOptions& opts = {});
[[nodiscard]] Mat2 transition_matrix_dk(const MetricGraph& g, EdgeIndex e, Complex k,
                                        const SolverOptions& opts = {});

/// Transition data for every edge at one k.
[[nodiscard]] std::vector<EdgeTransition> all_transitions(const MetricGraph& g, Complex k, bool want_dk,
                                                          const SolverOptions& opts = {});

[[nodiscard]] std::array<Complex, 2> eigenvalues(const Mat2& m);

struct SubunitarityCheck {
    bool subunitary = false;
    double max_modulus = 0.0;
};

/// Whether both eigenvalues of t(k + i eps) have modulus <= 1.
[[nodiscard]] SubunitarityCheck verify_subunitary(const MetricGraph& g, EdgeIndex e, double k, double eps,
                                                  const SolverOptions& opts = {});

struct ThresholdEstimate {
    double K = 0.0;
    /// True when some edge needed the empirical scan (smooth potentials).
    bool heuristic = false;
    std::vector<double> per_edge;
};

/// Energy threshold above which every t(k + i eps) is subunitary.
/// Zero and nonnegative delta edges give 0, negative deltas the closed-form
/// bound sqrt(-D/L - D^2/4); constant and smooth edges are scanned on a k grid
/// starting at sqrt(sup w+).
[[nodiscard]] ThresholdEstimate subunitarity_threshold(const MetricGraph& g, const SolverOptions& opts = {});

/// Closed-form threshold for a single delta edge.
[[nodiscard]] double delta_threshold(double strength, double length);

}  // namespace qgraph
