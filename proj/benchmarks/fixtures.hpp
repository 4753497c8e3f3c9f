#pragma once

#include <string>

#include "qgraph/graph_io.hpp"

namespace qgraph::bench {

inline MetricGraph fixture(const std::string& name) {
    return load_graph(std::string(QGRAPH_FIXTURE_DIR) + "/" + name + ".json");
}

}  // namespace qgraph::bench
