#include "qgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <boost/math/tools/roots.hpp>
#include <Eigen/LU>

#include "qgraph/error.hpp"
#include "qgraph/parallel.hpp"

namespace qgraph {

int SpectrumResult::count() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

namespace {

struct Sample {
    double k = 0.0;
    std::vector<Complex> det_t;
    Complex det_i_minus_s;
    double theta = 0.0;
    double zeta = 0.0;  // real secular function
    Complex zeta_c;
};

// Evaluates det t_e and det(I - S) at a (possibly complex) k.
struct Evaluator {
    const MetricGraph& g;
    SolverOptions opts;
    double sigma_phase;

    Sample raw(Complex k) const {
        const UnitaryAssembly a = assemble_S(g, k, false, opts);
        Sample s;
        s.k = k.real();
        s.det_t.reserve(a.edges.size());
        for (const auto& t : a.edges) s.det_t.push_back(t.t.determinant());
        const auto n = a.S.rows();
        s.det_i_minus_s = (MatrixXc::Identity(n, n) - a.S).partialPivLu().determinant();
        return s;
    }

    // Fills theta and zeta given the unwrapped phases.
    void finish(Sample& s, double theta) const {
        s.theta = theta;
        s.zeta_c = std::exp(Complex(0.0, -0.5 * (theta + sigma_phase))) * s.det_i_minus_s;
        s.zeta = s.zeta_c.real();
    }

    // Sample at k continued from the branch of a nearby reference sample.
    Sample near(double k, const Sample& ref, std::span<const double> ref_phases) const {
        Sample s = raw(Complex(k));
        double theta = 0.0;
        for (std::size_t e = 0; e < s.det_t.size(); ++e) {
            theta += ref_phases[e] + wrap_angle(std::arg(s.det_t[e]) - ref_phases[e]);
        }
        (void)ref;
        finish(s, theta);
        return s;
    }
};

// Unwrapped per-edge phases stored alongside each grid sample.
struct Grid {
    std::vector<Sample> samples;
    std::vector<std::vector<double>> phases;
};

// Sequential phase pass; inserts midpoints where a phase step is too large.
Grid unwrap_grid(const MetricGraph& g, const Evaluator& ev, std::vector<Sample> raw, std::size_t& evaluations) {
    Grid grid;
    BranchState branch(g);
    // Fast phase growth near the threshold aliases at larger increments.
    branch.max_step = 0.25 * pi;
    std::vector<Sample> pending(raw.rbegin(), raw.rend());
    int refinements = 0;
    while (!pending.empty()) {
        Sample s = std::move(pending.back());
        pending.pop_back();
        BranchState trial = branch;
        try {
            const double th = trial.advance(g, Complex(s.k), s.det_t);
            branch = trial;
            ev.finish(s, th);
            grid.phases.emplace_back(branch.edge_phases().begin(), branch.edge_phases().end());
            grid.samples.push_back(std::move(s));
        } catch (const PhaseStepError&) {
            if (grid.samples.empty() || ++refinements > 100000) throw;
            const double mid = 0.5 * (grid.samples.back().k + s.k);
            if (!(mid > grid.samples.back().k && mid < s.k)) throw;
            pending.push_back(std::move(s));
            pending.push_back(ev.raw(Complex(mid)));
            ++evaluations;
        }
    }
    return grid;
}

// Argument change of f along a straight segment, subdividing until every
// increment is below pi/4.
struct PathTracker {
    std::function<Complex(Complex)> f;
    double total = 0.0;
    double min_modulus = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    int depth_limit = 30;

    void segment(Complex a, Complex fa, Complex b, Complex fb, int depth) {
        const double step = wrap_angle(std::arg(fb) - std::arg(fa));
        if (std::abs(step) <= 0.25 * pi) {
            total += step;
            return;
        }
        if (depth >= depth_limit) {
            throw NumericalError("argument tracking did not converge on the contour; a zero lies too close to it");
        }
        const Complex m = 0.5 * (a + b);
        const Complex fm = eval(m);
        segment(a, fa, m, fm, depth + 1);
        segment(m, fm, b, fb, depth + 1);
    }

    Complex eval(Complex z) {
        const Complex v = f(z);
        ++evaluations;
        min_modulus = std::min(min_modulus, std::abs(v));
        return v;
    }

    // Runs along the polyline, with `pieces` initial subdivisions per side.
    void polyline(std::span<const Complex> corners, int pieces) {
        Complex prev = corners[0];
        Complex fprev = eval(prev);
        for (std::size_t c = 1; c < corners.size(); ++c) {
            for (int j = 1; j <= pieces; ++j) {
                const Complex z = corners[c - 1] + (corners[c] - corners[c - 1]) * (double(j) / pieces);
                const Complex fz = eval(z);
                segment(prev, fprev, z, fz, 0);
                prev = z;
                fprev = fz;
            }
        }
    }
};

double contour_floor(const MetricGraph& g) { return 1e-12 * static_cast<double>(g.directed_count()); }

Complex det_i_minus_s(const MetricGraph& g, Complex k, const SolverOptions& opts) {
    const UnitaryAssembly a = assemble_S(g, k, false, opts);
    const auto n = a.S.rows();
    return (MatrixXc::Identity(n, n) - a.S).partialPivLu().determinant();
}

Complex det_s_over_sigma(const MetricGraph& g, Complex k, const SolverOptions& opts) {
    Complex d = 1.0;
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) d *= transition_matrix(g, e, k, opts).determinant();
    return d;
}

}  // namespace

int winding_number(const MetricGraph& g, double a, double b, double h, const SolverOptions& opts) {
    if (!(b > a) || !(h > 0.0)) throw InputError("winding_number needs a < b and h > 0");
    const std::array<Complex, 4> path{Complex(b, 0.0), Complex(b, h), Complex(a, h), Complex(a, 0.0)};
    PathTracker numer{[&](Complex k) { return det_i_minus_s(g, k, opts); }};
    numer.polyline(path, 8);
    if (numer.min_modulus < contour_floor(g)) {
        throw NumericalError("contour passes too close to a zero of the secular function");
    }
    PathTracker phase{[&](Complex k) { return det_s_over_sigma(g, k, opts); }};
    phase.polyline(path, 8);
    const double w = (numer.total - 0.5 * phase.total) / pi;
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.25) {
        std::ostringstream msg;
        msg << "winding number " << w << " is not close to an integer";
        throw NumericalError(msg.str());
    }
    return static_cast<int>(rounded);
}

int winding_number_full(const MetricGraph& g, double a, double b, double h, const SolverOptions& opts) {
    if (!(b > a) || !(h > 0.0)) throw InputError("winding_number_full needs a < b and h > 0");
    const std::array<Complex, 5> path{Complex(a, -h), Complex(b, -h), Complex(b, h), Complex(a, h), Complex(a, -h)};
    PathTracker tracker{[&](Complex k) { return det_i_minus_s(g, k, opts); }};
    tracker.polyline(path, 8);
    if (tracker.min_modulus < contour_floor(g)) {
        throw NumericalError("contour passes too close to a zero of the secular function");
    }
    return static_cast<int>(std::lround(tracker.total / (2.0 * pi)));
}

int multiplicity(const MetricGraph& g, double k0, double radius, const SolverOptions& opts, double threshold) {
    if (k0 <= threshold) {
        throw InputError("multiplicity requested at k0 = " + std::to_string(k0) + " not above the threshold K = " +
                         std::to_string(threshold));
    }
    if (!(radius > 0.0) || radius >= k0) throw InputError("multiplicity needs 0 < radius < k0");
    return winding_number(g, k0 - radius, k0 + radius, radius, opts);
}

SpectrumResult scan_spectrum(const MetricGraph& g, double k_lo, double k_hi, const ScanConfig& cfg) {
    SpectrumResult out;
    if (!(k_hi > k_lo)) throw InputError("scan_spectrum needs k_hi > k_lo");
    if (cfg.threshold >= 0.0) {
        out.threshold = cfg.threshold;
    } else {
        const ThresholdEstimate est = subunitarity_threshold(g, cfg.solver);
        out.threshold = est.K;
        out.threshold_heuristic = est.heuristic;
    }
    const double lo = std::max(k_lo, cfg.floor);
    if (lo >= k_hi) throw InputError("scan range lies below the floor k = " + std::to_string(cfg.floor));
    out.k_lo = lo;
    out.k_hi = k_hi;
    const double max_step = pi / (4.0 * g.total_length());
    out.step = cfg.step > 0.0 ? std::min(cfg.step, max_step) : max_step;

    const Evaluator ev{g, cfg.solver, sigma_determinant_sign(g) < 0 ? pi : 0.0};

    const auto n = static_cast<std::size_t>(std::ceil((k_hi - lo) / out.step));
    std::vector<double> ks(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ks[i] = i == n ? k_hi : lo + static_cast<double>(i) * out.step;
    std::vector<Sample> raw(ks.size());
    parallel_for(ks.size(), cfg.workers, [&](std::size_t i) { raw[i] = ev.raw(Complex(ks[i])); });
    out.evaluations = ks.size();
    const Grid grid = unwrap_grid(g, ev, std::move(raw), out.evaluations);
    const auto& s = grid.samples;

    // Candidate brackets: sign changes and touching extrema.
    struct Candidate {
        std::size_t i;
        bool sign_change;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i].zeta == 0.0 || (s[i].zeta > 0.0) != (s[i + 1].zeta > 0.0)) candidates.push_back({i, true});
    }
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double a = std::abs(s[i - 1].zeta), b = std::abs(s[i].zeta), c = std::abs(s[i + 1].zeta);
        const bool same_sign = (s[i - 1].zeta > 0.0) == (s[i].zeta > 0.0) && (s[i].zeta > 0.0) == (s[i + 1].zeta > 0.0);
        if (same_sign && b < a && b <= c) candidates.push_back({i, false});
    }

    std::vector<SpectralRoot> found;
    std::mutex found_mutex;
    std::vector<std::string> notes(candidates.size());
    parallel_for(candidates.size(), cfg.workers, [&](std::size_t c) {
        const Candidate cand = candidates[c];
        const std::size_t i = cand.i;
        const auto& phases = grid.phases[i];
        auto zeta_at = [&](double k) { return ev.near(k, s[i], phases).zeta; };
        if (cand.sign_change) {
            double root = s[i].k;
            if (s[i].zeta != 0.0) {
                boost::uintmax_t iters = 200;
                auto tol = [&](double a, double b) { return std::abs(b - a) < 0.1 * cfg.root_tolerance; };
                const auto bracket = boost::math::tools::toms748_solve(zeta_at, s[i].k, s[i + 1].k, s[i].zeta,
                                                                       s[i + 1].zeta, tol, iters);
                root = 0.5 * (bracket.first + bracket.second);
            }
            std::lock_guard lock(found_mutex);
            found.push_back({root, 1, std::abs(zeta_at(root))});
            return;
        }
        // Touching zero: locate the extremum of zeta by bisection on the sign of its slope.
        double a = s[i - 1].k, b = s[i + 1].k;
        const double h = 1e-6 * std::max(1.0, s[i].k);
        auto slope = [&](double k) { return zeta_at(k + h) - zeta_at(k - h); };
        const double sa = slope(a);
        for (int it = 0; it < 80 && b - a > 0.1 * cfg.root_tolerance; ++it) {
            const double m = 0.5 * (a + b);
            const double sm = slope(m);
            if ((sm > 0.0) == (sa > 0.0)) a = m;
            else b = m;
        }
        const double k_star = 0.5 * (a + b);
        const double value = zeta_at(k_star);
        // Compare with the local scale of zeta; far-from-zero extrema are not roots.
        const double scale = std::max({std::abs(s[i - 1].zeta), std::abs(s[i + 1].zeta), 1e-300});
        if (std::abs(value) > 1e-3 * scale) return;
        int mult = 0;
        try {
            mult = multiplicity(g, k_star, 0.25 * out.step, cfg.solver, 0.0);
        } catch (const NumericalError& err) {
            notes[c] = "unresolved touching zero near k = " + std::to_string(k_star) + ": " + err.what();
            return;
        }
        if (mult > 0) {
            std::lock_guard lock(found_mutex);
            found.push_back({k_star, mult, std::abs(value)});
        }
    });
    for (auto& note : notes) {
        if (!note.empty()) out.diagnostics.push_back(std::move(note));
    }

    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.k < y.k; });
    // Merge clusters closer than the merge tolerance and resolve them by winding number.
    std::vector<SpectralRoot> merged;
    for (std::size_t i = 0; i < found.size();) {
        std::size_t j = i + 1;
        while (j < found.size() && found[j].k - found[j - 1].k < cfg.merge_tolerance) ++j;
        if (j == i + 1) {
            merged.push_back(found[i]);
        } else {
            SpectralRoot r = found[i];
            r.k = 0.5 * (found[i].k + found[j - 1].k);
            try {
                r.multiplicity = multiplicity(g, r.k, 0.25 * out.step, cfg.solver, 0.0);
            } catch (const NumericalError& err) {
                r.multiplicity = static_cast<int>(j - i);
                out.diagnostics.push_back("cluster near k = " + std::to_string(r.k) + " unresolved: " + err.what());
            }
            merged.push_back(r);
        }
        i = j;
    }

    for (const auto& r : merged) {
        if (r.k <= out.threshold && !cfg.allow_below_threshold) {
            out.diagnostics.push_back("root at k = " + std::to_string(r.k) + " is not above the threshold K = " +
                                      std::to_string(out.threshold) + " and was dropped");
            continue;
        }
        out.roots.push_back(r);
    }
    if (out.threshold > lo) {
        out.diagnostics.insert(out.diagnostics.begin(),
                               "eigenvalues at or below the threshold K = " + std::to_string(out.threshold) +
                                   " are not reported");
    }
    return out;
}

}  // namespace qgraph
