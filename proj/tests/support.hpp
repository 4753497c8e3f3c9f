#pragma once

#include <string>
#include <vector>

#include "qgraph/graph_io.hpp"

namespace qgraph::test {

inline std::string fixture_path(const std::string& name) { return std::string(QGRAPH_FIXTURE_DIR) + "/" + name; }

inline MetricGraph fixture(const std::string& name) { return load_graph(fixture_path(name + ".json")); }

/// Every JSON fixture except the malformed one.
inline const std::vector<std::string>& all_fixtures() {
    static const std::vector<std::string> names = {"interval",   "interval_delta", "star3", "star3_equilateral",
                                                   "triangle",   "delta_star",     "smooth", "constant"};
    return names;
}

/// Single-edge graph of the given length and potential between two leaves.
inline MetricGraph single_edge(double length, const Potential& w) {
    GraphSpec spec;
    spec.vertices = {"a", "b"};
    spec.edges.push_back({"e", "a", "b", length, w});
    return build_graph(spec);
}

}  // namespace qgraph::test
