#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "output.hpp"
#include "qgraph/error.hpp"
#include "qgraph/graph_io.hpp"

namespace qgraph::cli {

namespace {

bool scans_in_k(const std::string& command) { return command == "spectrum" || command == "secular-scan"; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

nlohmann::json canonical_config(const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["input"] = cfg.input;
    j["tol"] = rounded(cfg.tol);
    j["allow_below_K"] = cfg.allow_below_k;
    if (scans_in_k(cfg.command)) {
        j["kmin"] = rounded(cfg.kmin);
        j["kmax"] = rounded(cfg.kmax);
        j["step"] = rounded(cfg.step);
    }
    if (cfg.command == "trace-check") {
        j["phi_center"] = rounded(cfg.phi_center);
        j["phi_sigma"] = rounded(cfg.phi_sigma);
        j["wkb"] = cfg.wkb;
    }
    if (cfg.command == "trace-check" || cfg.command == "orbits" || cfg.command == "wkb-compare") {
        j["nmax"] = cfg.nmax;
    }
    if (cfg.command == "wkb-compare") {
        auto ks = nlohmann::json::array();
        for (double k : cfg.ks) ks.push_back(rounded(k));
        j["k"] = ks;
    }
    if (cfg.sample_k) j["sample_k"] = rounded(*cfg.sample_k);
    return j;
}

Job prepare(const RunConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw InputError("--tol must be positive");
    if (scans_in_k(cfg.command)) {
        if (!(cfg.kmax > cfg.kmin)) throw InputError("--kmax must exceed --kmin");
        if (cfg.kmin < 0.0) throw InputError("--kmin must be nonnegative");
        if (cfg.step < 0.0) throw InputError("--step must be nonnegative");
    }
    if (cfg.command == "trace-check" && !(cfg.phi_sigma > 0.0)) throw InputError("--phi-sigma must be positive");
    if (cfg.command == "orbits" && cfg.nmax == 0) throw InputError("--nmax must be at least 1");
    if (cfg.sample_k && !(*cfg.sample_k > 0.0)) throw InputError("--sample-k must be positive");
    for (double k : cfg.ks) {
        if (!(k > 0.0)) throw InputError("--k values must be positive");
    }

    Job job{cfg, MetricGraph{}, read_file(cfg.input), {}, {}, {}, {}};
    job.graph = parse_graph(job.input_bytes);
    job.hash = config_hash(canonical_config(cfg), job.input_bytes);
    job.solver.rtol = cfg.tol;
    job.solver.atol = cfg.tol;
    job.warnings = continuity_warnings(job.graph);

    if (scans_in_k(cfg.command)) {
        job.threshold = subunitarity_threshold(job.graph, job.solver);
        const double K = job.threshold->K;
        if (cfg.kmin < K) {
            std::ostringstream msg;
            msg << "--kmin " << format_double(cfg.kmin) << " is below the threshold K = " << format_double(K);
            if (!cfg.allow_below_k) throw InputError(msg.str() + " (use --allow-below-K for diagnostics)");
            job.warnings.push_back(msg.str());
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) throw InputError("cannot create output directory '" + cfg.out + "': " + ec.message());
    return job;
}

int execute(const RunConfig& cfg) {
    try {
        Job job = prepare(cfg);
        for (const auto& w : job.warnings) std::cerr << "warning: " << w << '\n';
        if (cfg.command == "spectrum") {
            cmd_spectrum(job);
        } else if (cfg.command == "trace-check") {
            cmd_trace_check(job);
        } else if (cfg.command == "secular-scan") {
            cmd_secular_scan(job);
        } else if (cfg.command == "wkb-compare") {
            cmd_wkb_compare(job);
        } else if (cfg.command == "orbits") {
            cmd_orbits(job);
        } else {
            throw InputError("unknown command '" + cfg.command + "'");
        }
        return success;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Spectra, secular functions and trace formulae of quantum graphs", "qgraph"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::optional<std::size_t> nmax;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "Graph description (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "ODE tolerance")->capture_default_str();
        sub->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")->capture_default_str();
        sub->add_flag("--allow-below-K", cfg.allow_below_k, "Permit energies below the threshold K");
    };
    auto k_range = [&](CLI::App* sub) {
        sub->add_option("--kmin", cfg.kmin, "Lower end of the k range")->required();
        sub->add_option("--kmax", cfg.kmax, "Upper end of the k range")->required();
        sub->add_option("--step", cfg.step, "Grid step (0 = default)")->capture_default_str();
    };

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues k_n with multiplicities");
    common(spectrum);
    k_range(spectrum);

    auto* trace = app.add_subcommand("trace-check", "Smoothed trace formula check");
    common(trace);
    trace->add_option("--phi-center", cfg.phi_center, "Gaussian test function centre")->required();
    trace->add_option("--phi-sigma", cfg.phi_sigma, "Gaussian test function width")->required();
    trace->add_option("--nmax", nmax, "Maximal orbit length (default 6)");
    trace->add_option("--sample-k", cfg.sample_k, "k for the orbit table weights (default: centre)");
    trace->add_flag("--wkb", cfg.wkb, "Add semiclassical columns");

    auto* secular = app.add_subcommand("secular-scan", "Secular function on a real grid");
    common(secular);
    k_range(secular);

    auto* wkb = app.add_subcommand("wkb-compare", "Exact versus WKB edge data");
    common(wkb);
    wkb->add_option("--k", cfg.ks, "Energies (default 10 20 40 80)");
    wkb->add_option("--nmax", nmax, "Maximal orbit length for the amplitude table (default 4)");

    auto* orbits = app.add_subcommand("orbits", "Periodic orbit enumeration");
    common(orbits);
    orbits->add_option("--nmax", nmax, "Maximal orbit length (default 4)");
    orbits->add_option("--sample-k", cfg.sample_k, "k at which weights are tabulated");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? success : input_error;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "trace-check") {
        cfg.nmax = nmax.value_or(6);
        if (!cfg.sample_k) cfg.sample_k = cfg.phi_center;
    } else {
        cfg.nmax = nmax.value_or(4);
    }
    if (cfg.command == "wkb-compare" && cfg.ks.empty()) cfg.ks = {10.0, 20.0, 40.0, 80.0};
    return execute(cfg);
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("qgraph");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qgraph::cli
