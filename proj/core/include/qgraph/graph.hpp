#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qgraph/potential.hpp"

namespace qgraph {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;
/// Directed edges are dense: edge e owns 2e (from -> to) and 2e+1 (to -> from).
using DirectedEdge = std::size_t;

[[nodiscard]] constexpr DirectedEdge reverse(DirectedEdge d) noexcept { return d ^ 1U; }
[[nodiscard]] constexpr EdgeIndex edge_of(DirectedEdge d) noexcept { return d >> 1U; }
[[nodiscard]] constexpr DirectedEdge forward_of(EdgeIndex e) noexcept { return 2 * e; }
[[nodiscard]] constexpr Orientation orientation_of(DirectedEdge d) noexcept {
    return (d & 1U) ? Orientation::reverse : Orientation::forward;
}

struct EdgeSpec {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
    Potential potential;
};

/// Declarative graph description (what the JSON file holds).
struct GraphSpec {
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
};

/// Finite metric graph with edge potentials. Immutable after construction.
class MetricGraph {
public:
    struct Edge {
        std::string id;
        VertexIndex from;
        VertexIndex to;
        double length;
        Potential potential;
    };

    [[nodiscard]] std::size_t vertex_count() const { return vertex_ids_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] std::size_t directed_count() const { return 2 * edges_.size(); }

    [[nodiscard]] const std::string& vertex_id(VertexIndex v) const { return vertex_ids_.at(v); }
    [[nodiscard]] const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }

    /// iota(d): vertex where the coordinate of d is 0.
    [[nodiscard]] VertexIndex origin(DirectedEdge d) const {
        const Edge& e = edges_.at(edge_of(d));
        return (d & 1U) ? e.to : e.from;
    }
    /// tau(d): vertex where the coordinate of d equals L_d.
    [[nodiscard]] VertexIndex terminus(DirectedEdge d) const { return origin(reverse(d)); }

    [[nodiscard]] double length(DirectedEdge d) const { return edges_.at(edge_of(d)).length; }
    [[nodiscard]] const Potential& potential(DirectedEdge d) const { return edges_.at(edge_of(d)).potential; }

    [[nodiscard]] std::size_t degree(VertexIndex v) const { return outgoing_.at(v).size(); }
    /// Directed edges d with iota(d) == v, ascending.
    [[nodiscard]] std::span<const DirectedEdge> outgoing(VertexIndex v) const { return outgoing_.at(v); }
    /// Directed edges d with tau(d) == v, ascending.
    [[nodiscard]] std::span<const DirectedEdge> incoming(VertexIndex v) const { return incoming_.at(v); }

    /// Sum of edge lengths.
    [[nodiscard]] double total_length() const { return total_length_; }
    [[nodiscard]] double max_edge_length() const;
    [[nodiscard]] double min_edge_length() const;

    [[nodiscard]] std::optional<VertexIndex> find_vertex(const std::string& id) const;

private:
    friend MetricGraph build_graph(const GraphSpec& spec);

    std::vector<std::string> vertex_ids_;
    std::vector<Edge> edges_;
    std::vector<std::vector<DirectedEdge>> outgoing_;
    std::vector<std::vector<DirectedEdge>> incoming_;
    double total_length_ = 0.0;
};

/// Validates the description and assigns the canonical directed-edge indexing.
/// Throws InputError on non-positive lengths, unknown endpoints, duplicate ids,
/// self-loops, isolated vertices or inadmissible potentials.
[[nodiscard]] MetricGraph build_graph(const GraphSpec& spec);

/// Vertex-continuity diagnostics for pointwise potentials (never an error).
[[nodiscard]] std::vector<std::string> continuity_warnings(const MetricGraph& g, double tolerance = 1e-8);

enum class AuxVertexKind { original, midpoint };

/// G with one degree-2 midpoint vertex inserted on every edge.
/// Vertices 0..V-1 are the original ones, V+e is the midpoint of edge e.
/// Edge 2e joins from(e) to the midpoint, edge 2e+1 joins the midpoint to to(e).
struct AuxiliaryGraph {
    std::size_t original_vertices = 0;
    std::vector<AuxVertexKind> kinds;
    std::vector<std::optional<EdgeIndex>> source_edge;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    [[nodiscard]] std::size_t vertex_count() const { return kinds.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges.size(); }
    [[nodiscard]] std::size_t midpoint_of(EdgeIndex e) const { return original_vertices + e; }

    /// Endpoints of original directed edge d as seen through G*: (iota, tau).
    [[nodiscard]] std::pair<std::size_t, std::size_t> directed_endpoints(DirectedEdge d) const;

    /// Proper 2-coloring by BFS, or nullopt if G* is not bipartite.
    [[nodiscard]] std::optional<std::vector<int>> two_coloring() const;
    [[nodiscard]] bool is_bipartite() const { return two_coloring().has_value(); }
};

[[nodiscard]] AuxiliaryGraph auxiliary_graph(const MetricGraph& g);

}  // namespace qgraph
