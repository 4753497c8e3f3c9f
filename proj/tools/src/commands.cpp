#include <algorithm>
#include <cmath>
#include <iostream>

#include "cli.hpp"
#include "output.hpp"
#include "qgraph/error.hpp"
#include "qgraph/orbits.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectrum.hpp"
#include "qgraph/trace.hpp"
#include "qgraph/wkb.hpp"

namespace qgraph::cli {

namespace {

using nlohmann::json;

json rounded_array(const std::vector<double>& xs) {
    auto a = json::array();
    for (double x : xs) a.push_back(rounded(x));
    return a;
}

json header(const Job& job) {
    json j;
    j["config"] = canonical_config(job.cfg);
    j["config_hash"] = job.hash;
    j["warnings"] = job.warnings;
    j["graph"] = {{"vertices", job.graph.vertex_count()},
                  {"edges", job.graph.edge_count()},
                  {"total_length", rounded(job.graph.total_length())}};
    return j;
}

std::filesystem::path out_path(const Job& job, const char* name) { return std::filesystem::path(job.cfg.out) / name; }

void report(const std::filesystem::path& path, std::size_t rows) {
    std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
}

void report(const std::filesystem::path& path) { std::cout << "wrote " << path.string() << '\n'; }

std::string walk_string(const std::vector<std::size_t>& walk) {
    std::string s;
    for (std::size_t i = 0; i < walk.size(); ++i) s += (i ? " " : "") + std::to_string(walk[i]);
    return s;
}

void require_wkb_edges(const MetricGraph& g) {
    for (const auto& e : g.edges()) {
        if (e.potential.is_delta()) throw InputError("WKB is not defined on delta edge '" + e.id + "'");
    }
}

}  // namespace

void cmd_spectrum(Job& job) {
    ScanConfig sc;
    sc.step = job.cfg.step;
    sc.allow_below_threshold = job.cfg.allow_below_k;
    sc.threshold = job.threshold->K;
    sc.workers = static_cast<unsigned>(resolve_workers(job.cfg.workers));
    sc.solver = job.solver;
    const SpectrumResult res = scan_spectrum(job.graph, job.cfg.kmin, job.cfg.kmax, sc);

    const auto csv_path = out_path(job, "spectrum.csv");
    CsvWriter csv(csv_path, job.hash, {"k", "multiplicity", "residual"});
    for (const auto& r : res.roots) {
        csv << r.k << r.multiplicity << r.residual;
        csv.end_row();
    }
    report(csv_path, csv.rows());

    json meta = header(job);
    meta["command"] = "spectrum";
    meta["K"] = rounded(res.threshold);
    meta["K_heuristic"] = res.threshold_heuristic;
    meta["K_per_edge"] = rounded_array(job.threshold->per_edge);
    meta["total_length"] = rounded(job.graph.total_length());
    meta["k_lo"] = rounded(res.k_lo);
    meta["k_hi"] = rounded(res.k_hi);
    meta["step"] = rounded(res.step);
    meta["evaluations"] = res.evaluations;
    meta["distinct_roots"] = res.roots.size();
    meta["eigenvalue_count"] = res.count();
    meta["diagnostics"] = res.diagnostics;
    const auto meta_path = out_path(job, "meta.json");
    write_json(meta_path, meta);
    report(meta_path);
}

void cmd_trace_check(Job& job) {
    if (job.cfg.wkb) require_wkb_edges(job.graph);
    TraceConfig tc;
    tc.n_max = job.cfg.nmax;
    tc.wkb = job.cfg.wkb;
    tc.scan.allow_below_threshold = job.cfg.allow_below_k;
    tc.scan.workers = static_cast<unsigned>(resolve_workers(job.cfg.workers));
    tc.scan.solver = job.solver;
    const TestFunction phi{job.cfg.phi_center, job.cfg.phi_sigma};
    const TraceReport r = trace_check(job.graph, phi, tc);

    json j = header(job);
    j["command"] = "trace-check";
    j["phi"] = {{"kind", "gaussian"}, {"center", rounded(phi.center)}, {"sigma", rounded(phi.sigma)}};
    j["K"] = rounded(r.threshold);
    j["K_heuristic"] = r.threshold_heuristic;
    j["total_length"] = rounded(job.graph.total_length());
    j["lhs"] = rounded(r.lhs);
    j["rhs_weyl"] = rounded(r.rhs_weyl);
    j["rhs_orbits"] = rounded_array(r.rhs_orbits);
    j["residuals"] = rounded_array(r.residuals);
    j["residual"] = rounded(r.residuals.empty() ? std::abs(r.lhs - r.rhs_weyl) : r.residuals.back());
    j["n_max"] = job.cfg.nmax;
    j["window"] = {rounded(r.window_lo), rounded(r.window_hi)};
    j["quadrature"] = {{"nodes", r.quadrature_nodes},
                       {"panels", r.quadrature_panels},
                       {"panel_width", rounded(r.panel_width)}};
    auto roots = json::array();
    for (const auto& root : r.roots) roots.push_back({{"k", rounded(root.k)}, {"multiplicity", root.multiplicity}});
    j["eigenvalues"] = roots;
    j["eigenvalue_count"] = r.eigenvalue_count;
    j["weyl_count"] = rounded(r.weyl_count);
    j["orbit_count"] = r.orbit_count;
    j["orbits_truncated"] = r.orbits_truncated;
    j["diagnostics"] = r.diagnostics;
    if (r.wkb) {
        j["wkb"] = {{"rhs_weyl", rounded(r.wkb->rhs_weyl)},
                    {"rhs_orbits", rounded_array(r.wkb->rhs_orbits)},
                    {"residuals", rounded_array(r.wkb->residuals)},
                    {"orbit_count", r.wkb->orbit_count}};
    }
    j["wall_time"] = rounded(r.wall_time);
    const auto json_path = out_path(job, "trace_report.json");
    write_json(json_path, j);
    report(json_path);

    const double k = *job.cfg.sample_k;
    const auto orbits = job.cfg.nmax > 0 ? enumerate_orbits(job.graph, job.cfg.nmax) : OrbitEnumeration{};
    const auto edges = all_transitions(job.graph, k, true, job.solver);
    const auto csv_path = out_path(job, "orbit_table.csv");
    CsvWriter csv(csv_path, job.hash,
                  {"id", "key", "n_p", "n_p_primitive", "repetitions", "sample_k", "weight_re", "weight_im",
                   "amplitude"});
    for (std::size_t i = 0; i < orbits.orbits.size(); ++i) {
        const auto& p = orbits.orbits[i];
        const OrbitWeight w = orbit_weight(job.graph, p, edges);
        csv << i << p.key() << p.length() << p.primitive_length << p.repetitions() << k << w.value.real()
            << w.value.imag() << orbit_amplitude(job.graph, p, edges);
        csv.end_row();
    }
    report(csv_path, csv.rows());
    std::cout << "residual(n_max=" << job.cfg.nmax << ") = " << format_double(j["residual"].get<double>()) << '\n';
}

void cmd_secular_scan(Job& job) {
    const double L = job.graph.total_length();
    const double step = job.cfg.step > 0.0 ? job.cfg.step : pi / (16.0 * L);
    const double lo = std::max(job.cfg.kmin, 1e-3);
    const auto n = static_cast<std::size_t>(std::ceil((job.cfg.kmax - lo) / step - 1e-9));
    std::vector<double> ks(n + 1);
    for (std::size_t i = 0; i < n; ++i) ks[i] = lo + static_cast<double>(i) * step;
    ks[n] = job.cfg.kmax;
    const auto samples =
        secular_sweep(job.graph, ks, job.solver, static_cast<unsigned>(resolve_workers(job.cfg.workers)));

    const auto csv_path = out_path(job, "secular.csv");
    CsvWriter csv(csv_path, job.hash, {"k", "re", "im", "theta"});
    for (const auto& s : samples) {
        csv << s.k << s.zeta.real() << s.zeta.imag() << s.theta;
        csv.end_row();
    }
    report(csv_path, csv.rows());
}

void cmd_wkb_compare(Job& job) {
    const MetricGraph& g = job.graph;
    require_wkb_edges(g);
    const std::size_t E = g.edge_count();
    constexpr std::size_t samples = 513;

    struct Row {
        double t_dev = 0.0, psi_dev = 0.0, delay = 0.0, delay_wkb = 0.0, eta1 = 0.0;
    };
    std::vector<Row> rows(job.cfg.ks.size());
    parallel_for(rows.size(), resolve_workers(job.cfg.workers), [&](std::size_t i) {
        const double k = job.cfg.ks[i];
        Row& row = rows[i];
        for (EdgeIndex e = 0; e < E; ++e) {
            const auto& edge = g.edge(e);
            const Mat2 t = transition_matrix(g, e, k, job.solver);
            row.t_dev = std::max(row.t_dev, (t - wkb_transition(g, e, k)).cwiseAbs().maxCoeff());

            std::vector<double> xs(samples);
            for (std::size_t s = 0; s < samples; ++s) xs[s] = edge.length * static_cast<double>(s) / (samples - 1);
            const auto exact = solution_profile(edge.potential, Orientation::forward, edge.length, k, 1.0,
                                                Complex(0.0, -k), xs, job.solver);
            const auto approx = wkb_profile(edge.potential, Orientation::forward, edge.length, k, xs);
            for (std::size_t s = 0; s < samples; ++s) {
                row.psi_dev = std::max(row.psi_dev, std::abs(exact[s].psi - approx[s]));
            }
            const auto eta = wkb_correction(g, forward_of(e), k, 1);
            row.eta1 = std::max(row.eta1, eta.sup.front());
        }
        row.delay = wigner_delay(g, k, job.solver);
        row.delay_wkb = wkb_wigner_delay(g, k);
    });

    const double twice_length = 2.0 * g.total_length();
    const auto csv_path = out_path(job, "wkb_compare.csv");
    CsvWriter csv(csv_path, job.hash,
                  {"k", "t_deviation", "psi_deviation", "k2_psi_deviation", "eta1_sup", "delay", "delay_wkb",
                   "delay_deviation", "delay_excess"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double k = job.cfg.ks[i];
        const Row& r = rows[i];
        csv << k << r.t_dev << r.psi_dev << k * k * r.psi_dev << r.eta1 << r.delay << r.delay_wkb
            << std::abs(r.delay - r.delay_wkb) << std::abs(r.delay - twice_length);
        csv.end_row();
    }
    report(csv_path, csv.rows());

    const auto orbits = job.cfg.nmax > 0 ? enumerate_orbits(g, job.cfg.nmax) : OrbitEnumeration{};
    const auto orbit_path = out_path(job, "wkb_orbits.csv");
    CsvWriter oc(orbit_path, job.hash,
                 {"k", "id", "key", "n_p", "repetitions", "action", "period", "stability", "backscatters",
                  "amplitude", "amplitude_wkb"});
    for (double k : job.cfg.ks) {
        const auto edges = all_transitions(g, k, true, job.solver);
        const auto wkb = wkb_edges(g, k);
        for (std::size_t i = 0; i < orbits.orbits.size(); ++i) {
            const auto& p = orbits.orbits[i];
            if (!p.transmission_only()) continue;
            const auto sc = semiclassical_trace_data(p, g, wkb);
            oc << k << i << p.key() << p.length() << sc.repetitions << sc.action << sc.period << sc.stability
               << sc.backscatters << orbit_amplitude(g, p, edges) << sc.amplitude;
            oc.end_row();
        }
    }
    report(orbit_path, oc.rows());
}

void cmd_orbits(Job& job) {
    const MetricGraph& g = job.graph;
    const auto orbits = enumerate_orbits(g, job.cfg.nmax);
    if (orbits.truncated) std::cerr << "warning: orbit enumeration truncated by the class budget\n";
    const AuxiliaryGraph aux = auxiliary_graph(g);

    std::vector<std::string> cols = {"id", "key", "n_p", "n_p_primitive", "repetitions", "transmission_only",
                                     "aux_walk"};
    std::vector<EdgeTransition> edges;
    if (job.cfg.sample_k) {
        edges = all_transitions(g, *job.cfg.sample_k, true, job.solver);
        cols.insert(cols.end(), {"sample_k", "weight_re", "weight_im", "amplitude"});
    }
    const auto csv_path = out_path(job, "orbits.csv");
    CsvWriter csv(csv_path, job.hash, cols);
    for (std::size_t i = 0; i < orbits.orbits.size(); ++i) {
        const auto& p = orbits.orbits[i];
        csv << i << p.key() << p.length() << p.primitive_length << p.repetitions()
            << static_cast<int>(p.transmission_only()) << walk_string(auxiliary_walk(g, aux, p));
        if (job.cfg.sample_k) {
            const OrbitWeight w = orbit_weight(g, p, edges);
            csv << *job.cfg.sample_k << w.value.real() << w.value.imag() << orbit_amplitude(g, p, edges);
        }
        csv.end_row();
    }
    report(csv_path, csv.rows());
}

}  // namespace qgraph::cli
