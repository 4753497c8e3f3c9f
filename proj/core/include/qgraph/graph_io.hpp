#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qgraph/graph.hpp"

namespace qgraph {

/// Parses the JSON graph description
///
///     {"vertices": [ids],
///      "edges": [{"id", "from", "to", "length",
///                 "potential": {"type": "zero" | "delta" | "constant" | "expr", ...}}]}
///
/// Ids may be strings or integers. "length" is a number or a constant
/// expression string such as "pi/3". Potential payloads:
///   delta    -> "delta": {"strength": D, "position": x0}   (x0 from "from")
///   constant -> "value": c
///   expr     -> "expr": "2*cos(3*x)"
/// A missing "potential" means zero. Throws InputError on any problem.
[[nodiscard]] GraphSpec parse_graph_spec(std::string_view json_text);

[[nodiscard]] MetricGraph parse_graph(std::string_view json_text);

[[nodiscard]] MetricGraph load_graph(const std::filesystem::path& path);

/// Serialises a spec back to the JSON format above (pretty-printed, sorted keys).
[[nodiscard]] std::string to_json(const GraphSpec& spec);

}  // namespace qgraph
