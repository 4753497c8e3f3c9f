#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "qgraph/error.hpp"

namespace qgraph {

double MetricGraph::max_edge_length() const {
    double m = 0.0;
    for (const auto& e : edges_) m = std::max(m, e.length);
    return m;
}

double MetricGraph::min_edge_length() const {
    double m = INFINITY;
    for (const auto& e : edges_) m = std::min(m, e.length);
    return m;
}

std::optional<VertexIndex> MetricGraph::find_vertex(const std::string& id) const {
    auto it = std::find(vertex_ids_.begin(), vertex_ids_.end(), id);
    if (it == vertex_ids_.end()) return std::nullopt;
    return static_cast<VertexIndex>(it - vertex_ids_.begin());
}

MetricGraph build_graph(const GraphSpec& spec) {
    MetricGraph g;
    std::unordered_map<std::string, VertexIndex> index;
    for (const auto& id : spec.vertices) {
        if (!index.emplace(id, g.vertex_ids_.size()).second) {
            throw InputError("duplicate vertex id '" + id + "'");
        }
        g.vertex_ids_.push_back(id);
    }
    if (spec.edges.empty()) throw InputError("graph has no edges");

    std::unordered_set<std::string> edge_ids;
    for (const auto& es : spec.edges) {
        if (!edge_ids.insert(es.id).second) throw InputError("duplicate edge id '" + es.id + "'");
        auto from = index.find(es.from);
        auto to = index.find(es.to);
        if (from == index.end()) throw InputError("edge '" + es.id + "': unknown endpoint '" + es.from + "'");
        if (to == index.end()) throw InputError("edge '" + es.id + "': unknown endpoint '" + es.to + "'");
        if (from->second == to->second) {
            throw InputError("edge '" + es.id + "' is a self-loop; subdivide it with a degree-2 vertex");
        }
        if (!(es.length > 0.0) || !std::isfinite(es.length)) {
            throw InputError("edge '" + es.id + "' must have a finite positive length");
        }
        try {
            es.potential.validate(es.length);
        } catch (const InputError& err) {
            throw InputError("edge '" + es.id + "': " + err.what());
        }
        g.edges_.push_back({es.id, from->second, to->second, es.length, es.potential});
        g.total_length_ += es.length;
    }

    g.outgoing_.assign(g.vertex_ids_.size(), {});
    g.incoming_.assign(g.vertex_ids_.size(), {});
    for (DirectedEdge d = 0; d < g.directed_count(); ++d) {
        g.outgoing_[g.origin(d)].push_back(d);
        g.incoming_[g.terminus(d)].push_back(d);
    }
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        if (g.outgoing_[v].empty()) throw InputError("vertex '" + g.vertex_ids_[v] + "' has no incident edge");
    }
    return g;
}

std::vector<std::string> continuity_warnings(const MetricGraph& g, double tolerance) {
    std::vector<std::string> warnings;
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) {
        double lo = INFINITY, hi = -INFINITY;
        for (DirectedEdge d : g.outgoing(v)) {
            const Potential& w = g.potential(d);
            // a delta sitting away from the vertex contributes w = 0 there
            const double value = w.is_delta() ? 0.0 : eval_oriented(w, orientation_of(d), g.length(d), 0.0);
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
        if (hi - lo > tolerance) {
            std::ostringstream os;
            os << "potential is discontinuous at vertex '" << g.vertex_id(v) << "' (values span [" << lo << ", "
               << hi << "])";
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

std::pair<std::size_t, std::size_t> AuxiliaryGraph::directed_endpoints(DirectedEdge d) const {
    const auto e = edge_of(d);
    const std::size_t from = edges.at(2 * e).first;
    const std::size_t to = edges.at(2 * e + 1).second;
    return (d & 1U) ? std::pair{to, from} : std::pair{from, to};
}

std::optional<std::vector<int>> AuxiliaryGraph::two_coloring() const {
    std::vector<std::vector<std::size_t>> adjacency(vertex_count());
    for (const auto& [a, b] : edges) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    std::vector<int> color(vertex_count(), -1);
    for (std::size_t start = 0; start < vertex_count(); ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        std::queue<std::size_t> q;
        q.push(start);
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (auto w : adjacency[u]) {
                if (color[w] == -1) {
                    color[w] = 1 - color[u];
                    q.push(w);
                } else if (color[w] == color[u]) {
                    return std::nullopt;
                }
            }
        }
    }
    return color;
}

AuxiliaryGraph auxiliary_graph(const MetricGraph& g) {
    AuxiliaryGraph aux;
    aux.original_vertices = g.vertex_count();
    aux.kinds.assign(g.vertex_count(), AuxVertexKind::original);
    aux.source_edge.assign(g.vertex_count(), std::nullopt);
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        aux.kinds.push_back(AuxVertexKind::midpoint);
        aux.source_edge.emplace_back(e);
    }
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(e);
        aux.edges.emplace_back(edge.from, aux.midpoint_of(e));
        aux.edges.emplace_back(aux.midpoint_of(e), edge.to);
    }
    return aux;
}

}  // namespace qgraph
