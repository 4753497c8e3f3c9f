#include <doctest.h>

#include <cmath>

#include "qgraph/edge_solver.hpp"
#include "qgraph/error.hpp"
#include "support.hpp"

using namespace qgraph;

namespace {

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Mat2& t) { return max_abs(t.adjoint() * t - Mat2::Identity()); }

// Closed-form transition matrix of a delta edge; x0 is measured from the
// terminal vertex of the forward orientation.
Mat2 delta_closed_form(double D, double x0, double L, double k) {
    const Complex a = D / (2.0 * I * k);
    Mat2 m;
    m << 1.0, a * std::exp(-2.0 * I * k * x0) * std::exp(I * k * L), a * std::exp(2.0 * I * k * x0) * std::exp(-I * k * L),
        1.0;
    return m / ((1.0 - a) * std::exp(-I * k * L));
}

Mat2 transition(const Potential& w, double L, Complex k) { return transition_matrix(test::single_edge(L, w), 0, k); }

}  // namespace

TEST_CASE("zero potential boundary data") {
    const double L = 1.7;
    for (double k : {0.4, 3.0, 25.0}) {
        const EdgeSolution s = solve_oriented(Potential::zero(), Orientation::forward, L, k, true);
        CHECK(std::abs(s.psi_plus - std::exp(-I * k * L)) < 1e-14);
        CHECK(std::abs(s.dpsi_plus + I * k * std::exp(-I * k * L)) < 1e-13 * k);
        CHECK(std::abs(s.psi_minus - std::exp(I * k * L)) < 1e-14);
        CHECK(std::abs(s.wronskian - 2.0 * I * k) < 1e-12 * k);
        const Mat2 t = transition(Potential::zero(), L, k);
        CHECK(max_abs(t - std::exp(I * k * L) * Mat2::Identity()) < 1e-14);
        const Mat2 dt = transition_matrix_dk(test::single_edge(L, Potential::zero()), 0, k);
        CHECK(max_abs(dt - I * L * std::exp(I * k * L) * Mat2::Identity()) < 1e-13);
    }
    CHECK_THROWS_AS((void)solve_oriented(Potential::zero(), Orientation::forward, L, 0.0, false), InputError);
}

TEST_CASE("delta solution on both sides of the jump") {
    const double D = 1.3, x0 = 0.35, L = 1.0, k = 4.2;
    std::vector<double> xs;
    for (int i = 0; i <= 20; ++i) xs.push_back(L * i / 20.0);
    const auto profile = solution_profile(Potential::delta(D, x0), Orientation::forward, L, k, 1.0, -I * k, xs);
    const Complex a = D / (2.0 * I * k);
    for (const auto& p : profile) {
        CAPTURE(p.x);
        const Complex expected = p.x < x0 ? std::exp(-I * k * p.x)
                                          : a * std::exp(-2.0 * I * k * x0) * std::exp(I * k * p.x) +
                                                (1.0 - a) * std::exp(-I * k * p.x);
        CHECK(std::abs(p.psi - expected) < 1e-13);
    }
}

TEST_CASE("constant potential against the plane wave") {
    const double c = 3.0, L = 1.2;
    for (double k : {2.5, 7.0}) {
        const double q = std::sqrt(k * k - c);
        const EdgeSolution s = solve_oriented(Potential::constant(c), Orientation::forward, L, k, false);
        const Complex expected = std::cos(q * L) - I * (k / q) * std::sin(q * L);
        CHECK(std::abs(s.psi_plus - expected) < 1e-13);
        // Same equation through the ODE path.
        const EdgeSolution o = solve_oriented(Potential::smooth("3"), Orientation::forward, L, k, false);
        CHECK(std::abs(o.psi_plus - expected) < 1e-8);
        CHECK(std::abs(o.dpsi_plus - s.dpsi_plus) < 1e-8 * k);
    }
    // Below the potential the plane wave becomes evanescent; still closed form.
    const double k = 1.0, kappa = std::sqrt(c - k * k);
    const EdgeSolution s = solve_oriented(Potential::constant(c), Orientation::forward, L, k, false);
    CHECK(std::abs(s.psi_plus - (std::cosh(kappa * L) - I * (k / kappa) * std::sinh(kappa * L))) < 1e-12);
}

TEST_CASE("complex k: ODE path agrees with the closed form") {
    for (Complex k : {Complex(4.0, 0.3), Complex(9.0, -0.2), Complex(2.0, 1.0)}) {
        const EdgeSolution a = solve_oriented(Potential::constant(3.0), Orientation::reverse, 1.1, k, true);
        const EdgeSolution b = solve_oriented(Potential::smooth("3"), Orientation::reverse, 1.1, k, true);
        const double scale = std::max(1.0, std::abs(a.psi_plus));
        CHECK(std::abs(a.psi_plus - b.psi_plus) < 1e-8 * scale);
        CHECK(std::abs(a.psi_minus - b.psi_minus) < 1e-8 * std::max(1.0, std::abs(a.psi_minus)));
        CHECK(std::abs(a.dk_psi_plus - b.dk_psi_plus) < 1e-7 * std::max(1.0, std::abs(a.dk_psi_plus)));
        CHECK(std::abs(b.wronskian - 2.0 * I * k) < 1e-8 * std::abs(k));
    }
}

TEST_CASE("delta transition matrix") {
    for (double D : {-1.5, 0.5, 2.0}) {
        for (double frac : {0.2, 0.5, 0.9}) {
            for (double L : {1.0, 2.5}) {
                for (double k : {3.0, 7.5, 15.0}) {
                    const double x0 = frac * L;
                    const Mat2 t = transition(Potential::delta(D, x0), L, k);
                    CHECK(max_abs(t - delta_closed_form(D, L - x0, L, k)) < 1e-12);
                    const auto mu = eigenvalues(t);
                    const Complex mu1 = std::exp(I * k * L);
                    const Complex mu2 = (2.0 * I * k + D) / (2.0 * I * k - D) * mu1;
                    const double err = std::min(std::abs(mu[0] - mu1) + std::abs(mu[1] - mu2),
                                                std::abs(mu[1] - mu1) + std::abs(mu[0] - mu2));
                    CHECK(err < 1e-12);
                    CHECK(std::abs(std::abs(mu[0]) - 1.0) < 1e-13);
                    CHECK(std::abs(std::abs(mu[1]) - 1.0) < 1e-13);
                }
            }
        }
    }
    const Mat2 t0 = transition(Potential::delta(0.0, 0.4), 1.0, 6.0);
    CHECK(max_abs(t0 - std::exp(I * 6.0) * Mat2::Identity()) < 1e-14);
}

TEST_CASE("smooth transition matrix is unitary") {
    const MetricGraph g = test::fixture("smooth");
    for (double k : {5.0, 10.0, 20.0}) {
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
            CHECK(unitarity_defect(transition_matrix(g, e, k)) < 1e-8);
        }
    }
}

TEST_CASE("dt/dk against central differences") {
    auto check = [](const MetricGraph& g, Complex k) {
        const double h = 1e-4;
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
            const Mat2 fd = (transition_matrix(g, e, k + h) - transition_matrix(g, e, k - h)) / (2.0 * h);
            CHECK(max_abs(fd - transition_matrix_dk(g, e, k)) < 1e-6);
        }
    };
    check(test::single_edge(1.0, Potential::delta(1.0, 0.5)), 5.0);
    check(test::single_edge(1.0, Potential::smooth("2*cos(3*x)")), 10.0);
    check(test::fixture("constant"), Complex(4.0, 0.2));
    check(test::fixture("smooth"), Complex(6.0, 0.1));
}

TEST_CASE("Wronskian and conjugacy on every fixture") {
    for (const auto& name : test::all_fixtures()) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        for (double k : {2.5, 8.0, 20.0}) {
            for (DirectedEdge d = 0; d < g.directed_count(); ++d) {
                const EdgeSolution s = solve_edge(g, d, k, false);
                CHECK(s.max_wronskian_defect < 1e-8);
                CHECK(std::abs(s.psi_minus - std::conj(s.psi_plus)) < 1e-10);
                CHECK(std::abs(s.dpsi_minus - std::conj(s.dpsi_plus)) < 1e-10 * k);
            }
            for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
                CHECK(unitarity_defect(transition_matrix(g, e, k)) < 1e-9);
            }
        }
    }
}

TEST_CASE("high-energy convergence to free transmission") {
    for (const auto& name : {"smooth", "constant", "interval_delta", "delta_star"}) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        double previous = 0.0;
        for (double k : {10.0, 20.0, 40.0, 80.0, 160.0}) {
            double worst = 0.0;
            for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
                const Mat2 free = std::exp(I * k * g.edge(e).length) * Mat2::Identity();
                worst = std::max(worst, (transition_matrix(g, e, k) - free).norm());
            }
            const double scaled = k * worst;
            if (previous > 0.0) {
                CHECK(scaled / previous > 0.4);
                CHECK(scaled / previous < 2.5);
            }
            previous = scaled;
        }
    }
}

TEST_CASE("subunitarity above the real axis") {
    const MetricGraph pos = test::single_edge(1.0, Potential::delta(2.0, 0.3));
    for (double k : {0.1, 0.5, 3.0, 40.0}) CHECK(verify_subunitary(pos, 0, k, 1e-3).subunitary);

    const MetricGraph neg = test::single_edge(1.0, Potential::delta(-1.0, 0.4));
    CHECK_FALSE(verify_subunitary(neg, 0, 0.5, 1e-3).subunitary);
    CHECK(verify_subunitary(neg, 0, 1.0, 1e-3).subunitary);

    const MetricGraph free = test::single_edge(1.5, Potential::zero());
    for (double k : {0.2, 5.0}) {
        const auto c = verify_subunitary(free, 0, k, 1e-2);
        CHECK(c.subunitary);
        CHECK(c.max_modulus == doctest::Approx(std::exp(-1e-2 * 1.5)).epsilon(1e-12));
    }
}

TEST_CASE("threshold K") {
    CHECK(subunitarity_threshold(test::fixture("interval")).K == 0.0);
    CHECK(subunitarity_threshold(test::fixture("interval_delta")).K == 0.0);
    CHECK(subunitarity_threshold(test::single_edge(1.0, Potential::delta(-1.0, 0.2))).K ==
          doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    const auto star = subunitarity_threshold(test::fixture("delta_star"));
    CHECK(star.K == doctest::Approx(std::sqrt(0.5 / std::sqrt(2.0) - 0.0625)).epsilon(1e-14));
    CHECK_FALSE(star.heuristic);
    REQUIRE(star.per_edge.size() == 3);
    CHECK(star.per_edge[0] == 0.0);

    const auto smooth = subunitarity_threshold(test::fixture("smooth"));
    CHECK(smooth.heuristic);
    CHECK(smooth.K >= std::sqrt(2.0) - 1e-12);
    CHECK(smooth.K < 4.0);
    const MetricGraph g = test::fixture("smooth");
    for (double k : {smooth.K + 0.05, smooth.K + 1.0, 10.0}) {
        for (EdgeIndex e = 0; e < g.edge_count(); ++e) CHECK(verify_subunitary(g, e, k, 1e-3).subunitary);
    }
}
