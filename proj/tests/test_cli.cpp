#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "output.hpp"
#include "qgraph/orbits.hpp"
#include "support.hpp"

using namespace qgraph;
namespace fs = std::filesystem;

namespace {

fs::path out_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / "qgraph_test_cli" / tag;
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

// Data rows (after the hash line and the header), split on commas.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
    const auto all = lines(p);
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 2; i < all.size(); ++i) {
        std::vector<std::string> cells;
        std::stringstream ss(all[i]);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        out.push_back(cells);
    }
    return out;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string fixture_file(const std::string& name) { return test::fixture_path(name + ".json"); }

int run(std::vector<std::string> args, const fs::path& out) {
    args.push_back("--out");
    args.push_back(out.string());
    args.push_back("--workers");
    args.push_back("1");
    return cli::run(args);
}

}  // namespace

TEST_CASE("spectrum command") {
    const fs::path out = out_dir("spectrum");
    REQUIRE(run({"spectrum", "--input", fixture_file("interval"), "--kmin", "0", "--kmax", "10.5"}, out) == 0);
    const auto all = lines(out / "spectrum.csv");
    REQUIRE(all.size() == 12);
    CHECK(all[0].rfind("# config_hash=", 0) == 0);
    CHECK(all[1] == "k,multiplicity,residual");
    CHECK(all[2].rfind("1.000000000000e+00,1,", 0) == 0);

    const auto meta = read_json(out / "meta.json");
    CHECK(meta["eigenvalue_count"] == 10);
    CHECK(meta["config_hash"].get<std::string>() == all[0].substr(14));
    CHECK(meta["K"].get<double>() == 0.0);
}

TEST_CASE("threshold gate") {
    const fs::path out = out_dir("gate");
    CHECK(run({"spectrum", "--input", fixture_file("delta_star"), "--kmin", "0.2", "--kmax", "4"}, out) ==
          cli::input_error);
    REQUIRE(run({"spectrum", "--input", fixture_file("delta_star"), "--kmin", "0.2", "--kmax", "4", "--allow-below-K"},
                out) == 0);
    const auto meta = read_json(out / "meta.json");
    CHECK(meta["K"].get<double>() == doctest::Approx(0.5394936427737));
    CHECK_FALSE(meta["K_heuristic"].get<bool>());
    REQUIRE(run({"spectrum", "--input", fixture_file("delta_star"), "--kmin", "0.6", "--kmax", "4"}, out) == 0);
}

TEST_CASE("input errors") {
    const fs::path out = out_dir("errors");
    CHECK(run({"spectrum", "--input", fixture_file("malformed"), "--kmin", "1", "--kmax", "5"}, out) ==
          cli::input_error);
    CHECK(run({"spectrum", "--input", fixture_file("interval"), "--kmin", "5", "--kmax", "1"}, out) ==
          cli::input_error);
    CHECK(run({"spectrum", "--input", "/nonexistent.json", "--kmin", "1", "--kmax", "5"}, out) == cli::input_error);
    CHECK(run({"orbits", "--input", fixture_file("triangle"), "--nmax", "0"}, out) == cli::input_error);
    CHECK(run({"wkb-compare", "--input", fixture_file("delta_star")}, out) == cli::input_error);
    CHECK(run({"trace-check", "--input", fixture_file("delta_star"), "--phi-center", "2", "--phi-sigma", "1"}, out) ==
          cli::input_error);
    CHECK(run({"no-such-command"}, out) == cli::input_error);
}

TEST_CASE("secular scan counts sign changes") {
    const fs::path out = out_dir("secular");
    REQUIRE(run({"secular-scan", "--input", fixture_file("interval"), "--kmin", "0.5", "--kmax", "10.5"}, out) == 0);
    const auto r = rows(out / "secular.csv");
    CHECK(r.size() == 161);
    int changes = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if ((std::stod(r[i - 1][1]) > 0.0) != (std::stod(r[i][1]) > 0.0)) ++changes;
    }
    CHECK(changes == 10);
    for (const auto& row : r) CHECK(std::abs(std::stod(row[2])) < 1e-10);
}

TEST_CASE("trace-check report") {
    const fs::path out = out_dir("trace");
    REQUIRE(run({"trace-check", "--input", fixture_file("interval"), "--phi-center", "20", "--phi-sigma", "0.5"}, out) ==
            0);
    const auto report = read_json(out / "trace_report.json");
    CHECK(report["residual"].get<double>() < 1e-6);
    CHECK(report["n_max"] == 6);
    CHECK(report["residuals"].size() == 7);
    CHECK(rows(out / "orbit_table.csv").size() == enumerate_orbits(test::fixture("interval"), 6).orbits.size());

    const fs::path none = out_dir("trace0");
    REQUIRE(run({"trace-check", "--input", fixture_file("interval"), "--phi-center", "20", "--phi-sigma", "0.5",
                 "--nmax", "0"},
                none) == 0);
    CHECK(read_json(none / "trace_report.json")["residuals"].size() == 1);
    CHECK(rows(none / "orbit_table.csv").empty());

    const fs::path with_wkb = out_dir("trace_wkb");
    REQUIRE(run({"trace-check", "--input", fixture_file("smooth"), "--phi-center", "14", "--phi-sigma", "1", "--nmax",
                 "3", "--wkb"},
                with_wkb) == 0);
    CHECK(read_json(with_wkb / "trace_report.json").contains("wkb"));
}

TEST_CASE("wkb-compare rows") {
    const fs::path out = out_dir("wkb");
    REQUIRE(run({"wkb-compare", "--input", fixture_file("smooth")}, out) == 0);
    const auto r = rows(out / "wkb_compare.csv");
    REQUIRE(r.size() == 4);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::stod(r[i][1]) < std::stod(r[i - 1][1]) * 1.5);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::stod(r[i][4]) < std::stod(r[i - 1][4]));
}

TEST_CASE("orbits table") {
    const fs::path out = out_dir("orbits");
    REQUIRE(run({"orbits", "--input", fixture_file("triangle"), "--nmax", "4", "--sample-k", "3"}, out) == 0);
    const auto all = lines(out / "orbits.csv");
    const auto r = rows(out / "orbits.csv");
    CHECK(r.size() == enumerate_orbits(test::fixture("triangle"), 4).orbits.size());
    CHECK(all[1].find("amplitude") != std::string::npos);
}

TEST_CASE("config hash ignores the worker count") {
    cli::RunConfig a;
    a.command = "spectrum";
    a.input = fixture_file("star3");
    a.kmax = 5.0;
    cli::RunConfig b = a;
    b.workers = 7;
    CHECK(cli::canonical_config(a) == cli::canonical_config(b));
    b.kmax = 6.0;
    CHECK(cli::canonical_config(a) != cli::canonical_config(b));
    CHECK(cli::format_double(-0.0) == "0.000000000000e+00");
    CHECK(cli::config_hash(cli::canonical_config(a), "x").size() == 16);
    CHECK(cli::config_hash(cli::canonical_config(a), "x") != cli::config_hash(cli::canonical_config(a), "y"));
}
