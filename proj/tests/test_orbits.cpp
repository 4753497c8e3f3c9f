#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qgraph/error.hpp"
#include "qgraph/orbits.hpp"
#include "qgraph/scattering.hpp"
#include "support.hpp"

using namespace qgraph;

namespace {

// Step adjacency on the 4E states: s -> s' when s' leaves the vertex s arrives at.
Eigen::MatrixXd step_adjacency(const MetricGraph& g) {
    const auto n = static_cast<Eigen::Index>(2 * g.directed_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s) {
        const OrbitStep from{s / 2, s % 2 == 1};
        for (std::size_t t = 0; t < static_cast<std::size_t>(n); ++t) {
            if (g.origin(t / 2) == g.terminus(from.via())) a(s, t) = 1.0;
        }
    }
    return a;
}

// Number of rotation classes of closed walks of length n (Burnside).
std::size_t necklace_count(const Eigen::MatrixXd& a, std::size_t n) {
    double sum = 0.0;
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (std::size_t m = 1; m <= n; ++m) {
        power = power * a;
        if (n % m == 0) {
            std::size_t phi = 0;
            for (std::size_t j = 1; j <= n / m; ++j) phi += std::gcd(j, n / m) == 1 ? 1 : 0;
            sum += static_cast<double>(phi) * power.trace();
        }
    }
    return static_cast<std::size_t>(std::llround(sum / static_cast<double>(n)));
}

std::size_t count_of_length(const OrbitEnumeration& e, std::size_t n) {
    return static_cast<std::size_t>(
        std::count_if(e.orbits.begin(), e.orbits.end(), [n](const PeriodicOrbit& p) { return p.length() == n; }));
}

// Canonical rotations of every closed walk, by brute force over all sequences.
std::set<std::vector<std::size_t>> brute_force_classes(const Eigen::MatrixXd& a, std::size_t n) {
    const std::size_t states = static_cast<std::size_t>(a.rows());
    std::set<std::vector<std::size_t>> classes;
    std::vector<std::size_t> seq(n, 0);
    while (true) {
        bool closed = true;
        for (std::size_t i = 0; i < n && closed; ++i) closed = a(seq[i], seq[(i + 1) % n]) != 0.0;
        if (closed) {
            std::vector<std::size_t> best = seq;
            for (std::size_t r = 1; r < n; ++r) {
                std::vector<std::size_t> rot(n);
                for (std::size_t i = 0; i < n; ++i) rot[i] = seq[(i + r) % n];
                best = std::min(best, rot);
            }
            classes.insert(best);
        }
        std::size_t pos = 0;
        while (pos < n && ++seq[pos] == states) seq[pos++] = 0;
        if (pos == n) break;
    }
    return classes;
}

}  // namespace

TEST_CASE("class counts match the necklace formula") {
    for (const auto& name : {"interval", "star3", "triangle", "constant"}) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        const auto a = step_adjacency(g);
        const OrbitEnumeration e = enumerate_orbits(g, 6);
        CHECK_FALSE(e.truncated);
        for (std::size_t n = 1; n <= 6; ++n) {
            CAPTURE(n);
            CHECK(count_of_length(e, n) == necklace_count(a, n));
        }
    }
    const OrbitEnumeration interval = enumerate_orbits(test::fixture("interval"), 1);
    REQUIRE(interval.orbits.size() == 2);
    CHECK(interval.orbits[0].key() == "0r");
    CHECK(interval.orbits[1].key() == "1r");
    CHECK_THROWS_AS((void)enumerate_orbits(test::fixture("interval"), 0), InputError);
}

TEST_CASE("triangle classes against brute-force canonical rotations") {
    const MetricGraph g = test::fixture("triangle");
    const auto a = step_adjacency(g);
    const OrbitEnumeration e = enumerate_orbits(g, 4);
    for (std::size_t n = 1; n <= 4; ++n) {
        CAPTURE(n);
        std::set<std::vector<std::size_t>> listed;
        for (const auto& p : e.orbits) {
            if (p.length() != n) continue;
            std::vector<std::size_t> seq;
            for (const auto& s : p.steps) seq.push_back(s.state());
            listed.insert(seq);
        }
        CHECK(listed == brute_force_classes(a, n));
    }
}

TEST_CASE("ordering, primitivity and repetitions") {
    const MetricGraph g = test::fixture("star3");
    const OrbitEnumeration e = enumerate_orbits(g, 6);
    std::set<std::string> keys;
    for (std::size_t i = 0; i < e.orbits.size(); ++i) {
        const PeriodicOrbit& p = e.orbits[i];
        CHECK(keys.insert(p.key()).second);
        if (i > 0) CHECK(e.orbits[i - 1].length() <= p.length());
        REQUIRE(p.primitive_length >= 1);
        CHECK(p.length() % p.primitive_length == 0);
        CHECK(p.repetitions() * p.primitive_length == p.length());
        for (std::size_t j = p.primitive_length; j < p.length(); ++j) CHECK(p.steps[j] == p.steps[j - p.primitive_length]);
        for (std::size_t j = 0; j < p.length(); ++j) {
            const OrbitStep& s = p.steps[j];
            CHECK(g.origin(p.steps[(j + 1) % p.length()].edge) == g.terminus(s.via()));
        }
    }

    // A repeated class carries the amplitude of its primitive raised to the power.
    const double k = 3.3;
    const auto edges = all_transitions(g, Complex(k), true);
    for (const auto& p : e.orbits) {
        if (p.repetitions() == 1) continue;
        PeriodicOrbit prim;
        prim.steps.assign(p.steps.begin(), p.steps.begin() + static_cast<std::ptrdiff_t>(p.primitive_length));
        prim.primitive_length = p.primitive_length;
        const OrbitWeight w = orbit_weight(g, prim, edges);
        const OrbitWeight wr = orbit_weight(g, p, edges);
        const double r = static_cast<double>(p.repetitions());
        CHECK(std::abs(wr.value - std::pow(w.value, r)) < 1e-12);
        CHECK(std::abs(wr.derivative - r * std::pow(w.value, r - 1.0) * w.derivative) < 1e-10);
    }
}

TEST_CASE("auxiliary walks are closed and alternate") {
    const MetricGraph g = test::fixture("triangle");
    const AuxiliaryGraph aux = auxiliary_graph(g);
    for (const auto& p : enumerate_orbits(g, 4).orbits) {
        const auto walk = auxiliary_walk(g, aux, p);
        REQUIRE(walk.size() == 2 * p.length() + 1);
        CHECK(walk.front() == walk.back());
        for (std::size_t i = 0; i < walk.size(); ++i) {
            const bool midpoint = aux.kinds[walk[i]] == AuxVertexKind::midpoint;
            CHECK(midpoint == (i % 2 == 1));
        }
    }
}

TEST_CASE("orbit sums reproduce tr S^n") {
    for (const auto& name : test::all_fixtures()) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        const double K = subunitarity_threshold(g).K;
        for (double k : {K + 1.3, K + 7.9}) {
            for (std::size_t n = 1; n <= 6; ++n) {
                CAPTURE(n);
                const OrbitSumCheck c = orbit_sum_check(g, k, n);
                CHECK(c.residual < 1e-10);
            }
        }
    }
}

TEST_CASE("amplitudes sum to Im tr(S^(n-1) dS)") {
    for (const auto& name : {"delta_star", "smooth", "triangle"}) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        const double k = 6.1;
        const UnitaryAssembly a = assemble_S(g, Complex(k), true);
        const OrbitEnumeration e = enumerate_orbits(g, 5);
        MatrixXc power = MatrixXc::Identity(a.S.rows(), a.S.cols());
        for (std::size_t n = 1; n <= 5; ++n) {
            double sum = 0.0;
            for (const auto& p : e.orbits) {
                if (p.length() == n) sum += orbit_amplitude(g, p, a.edges);
            }
            CHECK(sum == doctest::Approx((power * *a.dS).trace().imag()).epsilon(1e-10).scale(1.0));
            power = power * a.S;
        }
    }
}

TEST_CASE("interval orbit amplitudes") {
    const MetricGraph g = test::fixture("interval");
    const double L = g.total_length();
    const OrbitEnumeration e = enumerate_orbits(g, 2);
    for (double k : {0.7, 2.2, 5.0}) {
        for (const auto& p : e.orbits) {
            const double amp = orbit_amplitude(g, p, k);
            if (!p.transmission_only()) {
                CHECK(std::abs(amp) < 1e-14);
            } else {
                REQUIRE(p.length() == 2);
                CHECK(amp == doctest::Approx(2.0 * L * std::cos(2.0 * k * L)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("delta step weights and amplitude derivative") {
    const MetricGraph g = test::fixture("interval_delta");
    const double k = 4.4;
    const UnitaryAssembly a = assemble_S(g, Complex(k), true);
    for (DirectedEdge d = 0; d < g.directed_count(); ++d) {
        for (bool reflect : {false, true}) {
            const OrbitStep s{d, reflect};
            CHECK(std::abs(step_transition(s, a.edges) - a.T(s.via(), d)) < 1e-15);
            CHECK(std::abs(step_transition(s, a.edges, true) - (*a.dT)(s.via(), d)) < 1e-15);
        }
    }

    const double h = 1e-5;
    for (const auto& p : enumerate_orbits(g, 3).orbits) {
        CAPTURE(p.key());
        const auto plus = all_transitions(g, Complex(k + h), false);
        const auto minus = all_transitions(g, Complex(k - h), false);
        const Complex fd = (orbit_weight(g, p, plus).value - orbit_weight(g, p, minus).value) / (2.0 * h);
        const double expected = static_cast<double>(p.primitive_length) / static_cast<double>(p.length()) * fd.imag();
        CHECK(orbit_amplitude(g, p, k) == doctest::Approx(expected).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("bipartite step matrix on the auxiliary graph") {
    // U maps midpoint amplitudes to vertex amplitudes and back; U^2 = diag(Sigma T, T Sigma).
    for (const auto& name : {"delta_star", "triangle"}) {
        CAPTURE(name);
        const MetricGraph g = test::fixture(name);
        const UnitaryAssembly a = assemble_S(g, Complex(5.2));
        const auto n = a.S.rows();
        MatrixXc u = MatrixXc::Zero(2 * n, 2 * n);
        u.topRightCorner(n, n) = a.sigma.cast<Complex>();
        u.bottomLeftCorner(n, n) = a.T;
        MatrixXc upow = MatrixXc::Identity(2 * n, 2 * n);
        MatrixXc spow = MatrixXc::Identity(n, n);
        for (int m = 1; m <= 8; ++m) {
            upow = upow * u;
            if (m % 2 == 1) {
                CHECK(std::abs(upow.trace()) < 1e-12);
            } else {
                spow = spow * a.S;
                CHECK(std::abs(upow.trace() - 2.0 * spow.trace()) < 1e-11);
            }
        }
    }
}

TEST_CASE("budget truncation") {
    const OrbitEnumeration e = enumerate_orbits(test::fixture("star3"), 6, 10);
    CHECK(e.truncated);
    CHECK(e.orbits.size() == 10);
}
