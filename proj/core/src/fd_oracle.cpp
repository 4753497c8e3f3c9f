#include "qgraph/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <Eigen/SparseCholesky>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

double node_potential(const MetricGraph::Edge& edge, double x) {
    if (edge.potential.is_zero() || edge.potential.is_delta()) return 0.0;
    return eval_oriented(edge.potential, Orientation::forward, edge.length, x);
}

}  // namespace

DiscretizedGraph discretize(const MetricGraph& g, const std::vector<std::size_t>& intervals) {
    if (intervals.size() != g.edge_count()) throw InputError("one interval count per edge is required");
    DiscretizedGraph out;
    out.intervals = intervals;
    std::size_t n = g.vertex_count();
    for (std::size_t m : intervals) {
        if (m < 2) throw InputError("each edge needs at least two grid intervals");
        n += m - 1;
    }
    out.mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd diag_potential = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<double>> triplets;

    std::size_t next_interior = g.vertex_count();
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        const std::size_t m = intervals[e];
        const double h = edge.length / static_cast<double>(m);
        // node ids along the edge from `from` to `to`
        std::vector<std::size_t> ids(m + 1);
        ids[0] = edge.from;
        ids[m] = edge.to;
        for (std::size_t i = 1; i < m; ++i) ids[i] = next_interior++;
        for (std::size_t i = 0; i < m; ++i) {
            const auto a = static_cast<int>(ids[i]), b = static_cast<int>(ids[i + 1]);
            triplets.emplace_back(a, a, 1.0 / h);
            triplets.emplace_back(b, b, 1.0 / h);
            triplets.emplace_back(a, b, -1.0 / h);
            triplets.emplace_back(b, a, -1.0 / h);
        }
        for (std::size_t i = 0; i <= m; ++i) {
            const double cell = (i == 0 || i == m) ? 0.5 * h : h;
            const auto id = static_cast<Eigen::Index>(ids[i]);
            out.mass[id] += cell;
            diag_potential[id] += cell * node_potential(edge, static_cast<double>(i) * h);
        }
        if (edge.potential.is_delta()) {
            const auto& d = std::get<DeltaPotential>(edge.potential.variant());
            const auto i = static_cast<std::size_t>(std::lround(d.position / h));
            diag_potential[static_cast<Eigen::Index>(ids[std::min(i, m)])] += d.strength;
        }
    }
    for (Eigen::Index i = 0; i < diag_potential.size(); ++i) {
        if (diag_potential[i] != 0.0) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag_potential[i]);
    }
    out.stiffness.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

DiscretizedGraph discretize(const MetricGraph& g, double h) {
    if (!(h > 0.0) || h > g.min_edge_length() / 16.0) {
        throw InputError("grid step h must satisfy 0 < h <= min L_e / 16");
    }
    std::vector<std::size_t> intervals;
    for (const auto& e : g.edges()) intervals.push_back(static_cast<std::size_t>(std::ceil(e.length / h - 1e-12)));
    return discretize(g, intervals);
}

Eigen::SparseMatrix<double> symmetric_operator(const DiscretizedGraph& d) {
    const Eigen::VectorXd s = d.mass.cwiseSqrt().cwiseInverse();
    return s.asDiagonal() * d.stiffness * s.asDiagonal();
}

namespace {

// Inertia counts of A - shift M sharing one symbolic factorization.
class InertiaCounter {
public:
    explicit InertiaCounter(const DiscretizedGraph& d) : d_(d), work_(d.stiffness) {
        work_.makeCompressed();
        ldlt_.analyzePattern(work_);
        for (Eigen::Index i = 0; i < work_.rows(); ++i) {
            base_.push_back(work_.coeff(i, i));
            scale_ = std::max(scale_, std::abs(base_.back()) / d.mass[i]);
        }
    }

    std::size_t operator()(double shift) {
        // A shift exactly on an eigenvalue leaves a zero pivot; nudge it off.
        const double unit = 1e-15 * std::max({1.0, std::abs(shift), scale_});
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double s = shift + (attempt == 0 ? 0.0 : unit * std::ldexp(1.0, 2 * attempt));
            for (Eigen::Index i = 0; i < work_.rows(); ++i) {
                work_.coeffRef(i, i) = base_[static_cast<std::size_t>(i)] - s * d_.mass[i];
            }
            ldlt_.factorize(work_);
            if (ldlt_.info() == Eigen::Success) return static_cast<std::size_t>((ldlt_.vectorD().array() < 0.0).count());
        }
        throw NumericalError("LDL^T factorization failed in the inertia count at shift " + std::to_string(shift));
    }

private:
    const DiscretizedGraph& d_;
    Eigen::SparseMatrix<double> work_;
    std::vector<double> base_;
    double scale_ = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace

std::size_t eigenvalues_below(const DiscretizedGraph& d, double shift) { return InertiaCounter(d)(shift); }

std::vector<double> fd_eigenvalues(const DiscretizedGraph& d, std::size_t first, std::size_t count) {
    // Gershgorin bounds of the symmetric operator
    const Eigen::SparseMatrix<double> b = symmetric_operator(d);
    double lower = 0.0, upper = 0.0;
    for (int c = 0; c < b.outerSize(); ++c) {
        double diag = 0.0, off = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(b, c); it; ++it) {
            if (it.row() == it.col()) diag = it.value();
            else off += std::abs(it.value());
        }
        lower = std::min(lower, diag - off);
        upper = std::max(upper, diag + off);
    }
    lower -= 1.0;
    upper += 1.0;
    if (first + count > d.unknowns()) throw InputError("more eigenvalues requested than unknowns");

    InertiaCounter below(d);
    std::vector<double> out;
    out.reserve(count);
    double lo = lower;
    for (std::size_t idx = first; idx < first + count; ++idx) {
        // smallest x with eigenvalues_below(x) > idx, bracketed in (lo, hi]
        double a = lo, c = upper;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + c);
            if (c - a <= 1e-14 * std::max(1.0, std::abs(m))) break;
            if (below(m) > idx) c = m;
            else a = m;
        }
        const double lambda = 0.5 * (a + c);
        out.push_back(lambda);
        lo = a;
    }
    return out;
}

namespace {

std::vector<double> nonnegative_k(const DiscretizedGraph& d, std::size_t count, std::vector<double>* negative) {
    // negative eigenvalues are separated with a small shift; Neumann zero modes count as nonnegative
    const std::size_t below = eigenvalues_below(d, -1e-9);
    if (negative) *negative = below ? fd_eigenvalues(d, 0, below) : std::vector<double>{};
    const auto lambdas = fd_eigenvalues(d, below, count);
    std::vector<double> k;
    for (double l : lambdas) k.push_back(std::sqrt(std::max(l, 0.0)));
    return k;
}

}  // namespace

FdSpectrum fd_spectrum(const MetricGraph& g, double h, std::size_t count, bool richardson) {
    FdSpectrum out;
    out.h = h;
    out.richardson = richardson;
    const DiscretizedGraph coarse = discretize(g, h);
    out.unknowns = coarse.unknowns();
    out.k = nonnegative_k(coarse, count, &out.negative_lambda);
    if (richardson) {
        std::vector<std::size_t> fine_intervals = coarse.intervals;
        for (auto& m : fine_intervals) m *= 2;
        const DiscretizedGraph fine = discretize(g, fine_intervals);
        const auto k_fine = nonnegative_k(fine, count, nullptr);
        for (std::size_t i = 0; i < out.k.size(); ++i) out.k[i] = (4.0 * k_fine[i] - out.k[i]) / 3.0;
        out.unknowns += fine.unknowns();
    }
    return out;
}

}  // namespace qgraph
