#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/edge_solver.hpp"
#include "qgraph/graph.hpp"

namespace qgraph::cli {

enum ExitCode : int { success = 0, numerical_failure = 1, input_error = 2 };

struct RunConfig {
    std::string command;
    std::string input;
    std::string out = ".";
    double kmin = 0.0;
    double kmax = 0.0;
    /// Scan or sweep step; 0 selects the command default.
    double step = 0.0;
    std::size_t nmax = 6;
    double phi_center = 0.0;
    double phi_sigma = 0.0;
    /// ODE relative and absolute tolerance.
    double tol = 1e-10;
    /// 0 means all available cores.
    std::size_t workers = 0;
    bool allow_below_k = false;
    bool wkb = false;
    /// wkb-compare energies.
    std::vector<double> ks;
    /// Energy at which orbit weights are tabulated.
    std::optional<double> sample_k;
};

/// Config fields that determine the output, as sorted JSON. Worker count is
/// excluded since results do not depend on it.
[[nodiscard]] nlohmann::json canonical_config(const RunConfig& cfg);

/// Loaded input shared by the commands.
struct Job {
    RunConfig cfg;
    MetricGraph graph;
    std::string input_bytes;
    std::string hash;
    SolverOptions solver;
    /// Computed for commands that scan in k.
    std::optional<ThresholdEstimate> threshold;
    std::vector<std::string> warnings;
};

/// Reads and validates the input graph and checks the config invariants.
/// Throws InputError.
[[nodiscard]] Job prepare(const RunConfig& cfg);

void cmd_spectrum(Job& job);
void cmd_trace_check(Job& job);
void cmd_secular_scan(Job& job);
void cmd_wkb_compare(Job& job);
void cmd_orbits(Job& job);

/// Runs one command, mapping exceptions to exit codes and messages on stderr.
[[nodiscard]] int execute(const RunConfig& cfg);

/// Parses the command line and executes it.
[[nodiscard]] int run(int argc, char** argv);
[[nodiscard]] int run(const std::vector<std::string>& args);

}  // namespace qgraph::cli
