#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qgraph/edge_solver.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/types.hpp"

namespace qgraph {

/// Kirchhoff-Neumann vertex scattering matrix at v, rows indexed by
/// outgoing(v) and columns by incoming(v) (both ascending):
/// sigma_{d d'} = -[d' = reverse(d)] + 2/deg(v).
[[nodiscard]] MatrixXr vertex_sigma(const MetricGraph& g, VertexIndex v);

/// Single entry sigma_{d d'} for tau(d') = iota(d); zero otherwise.
[[nodiscard]] double sigma_entry(const MetricGraph& g, DirectedEdge d, DirectedEdge d_prime);

/// 2E x 2E vertex scattering matrix (k-independent).
[[nodiscard]] MatrixXr sigma_matrix(const MetricGraph& g);

/// 2E x 2E edge transition matrix from per-edge blocks:
/// T(2e,2e) = t22, T(2e+1,2e+1) = t11, T(2e,2e+1) = t21, T(2e+1,2e) = t12.
[[nodiscard]] MatrixXc block_transition(std::span<const EdgeTransition> edges, bool derivative = false);

/// Snapshot of Sigma, T(k) and S(k) = Sigma T(k).
struct UnitaryAssembly {
    Complex k;
    MatrixXr sigma;
    MatrixXc T;
    MatrixXc S;
    /// dT/dk and dS/dk when requested.
    std::optional<MatrixXc> dT;
    std::optional<MatrixXc> dS;
    std::vector<EdgeTransition> edges;
};

[[nodiscard]] UnitaryAssembly assemble_S(const MetricGraph& g, Complex k, bool want_dk = false,
                                         const SolverOptions& opts = {});

/// Continuous-phase bookkeeping for arg det t_e along a k path.
/// Zero and delta edges are seeded with their closed-form phase, so Theta is
/// absolute for such graphs; other edges start from a reference phase and are
/// unwrapped from there.
class BranchState {
public:
    BranchState() = default;
    explicit BranchState(const MetricGraph& g);

    [[nodiscard]] bool initialized() const { return initialized_; }
    /// Resets so the next evaluation reseeds the phases.
    void reset() { initialized_ = false; }

    /// Advances the per-edge phases to new det t_e values at k and returns
    /// Theta = sum of the phases. Throws PhaseStepError when a wrapped increment
    /// exceeds max_step.
    double advance(const MetricGraph& g, Complex k, std::span<const Complex> det_t);

    [[nodiscard]] double theta() const;
    [[nodiscard]] std::span<const double> edge_phases() const { return phases_; }

    double max_step = 0.75 * pi;

private:
    bool initialized_ = false;
    std::vector<double> phases_;
};

/// Reference phase of det t_e used to seed the unwrapping.
[[nodiscard]] double seed_phase(const MetricGraph::Edge& edge, Complex k);

struct SecularValue {
    Complex k;
    Complex zeta;
    Complex det_i_minus_s;
    /// Unwrapped phase of det S = Theta + arg det Sigma.
    double det_s_phase = 0.0;
    /// Unwrapped phase of det T.
    double theta = 0.0;
};

/// Sign of det Sigma (+1 or -1).
[[nodiscard]] int sigma_determinant_sign(const MetricGraph& g);

/// Secular function zeta(k) = (det S)^{-1/2} det(I - S(k)), with the branch of
/// the square root carried by the given state. Off the real axis the modulus
/// |det S|^{-1/2} is included so zeta stays analytic.
[[nodiscard]] SecularValue secular(const MetricGraph& g, Complex k, BranchState& branch,
                                   const SolverOptions& opts = {});

/// Secular function from an already assembled snapshot.
[[nodiscard]] SecularValue secular(const MetricGraph& g, const UnitaryAssembly& assembly, BranchState& branch);

/// Unwrapped Theta(k) = arg det T(k).
[[nodiscard]] double theta(const MetricGraph& g, Complex k, BranchState& branch, const SolverOptions& opts = {});

/// d/dk log det T = sum over edges of tr(t_e^{-1} t_e').
[[nodiscard]] Complex log_det_t_derivative(std::span<const EdgeTransition> edges);

/// dTheta/dk; real for real k.
[[nodiscard]] double theta_derivative(const MetricGraph& g, double k, const SolverOptions& opts = {});

/// Sweep of (k, Re zeta, Im zeta, Theta) along an ascending real grid.
struct SecularSample {
    double k;
    Complex zeta;
    double theta;
};

[[nodiscard]] std::vector<SecularSample> secular_sweep(const MetricGraph& g, std::span<const double> ks,
                                                       const SolverOptions& opts = {}, unsigned workers = 1);

}  // namespace qgraph
