#include "qgraph/graph_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qgraph/error.hpp"

namespace qgraph {

namespace {

using nlohmann::json;

std::string id_string(const json& j, const std::string& what) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw InputError(what + " must be a string or integer id");
}

double number_or_expression(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const Expression e = Expression::parse(j.get<std::string>());
        if (e.depends_on_x()) throw InputError(what + " must not depend on x");
        return e(0.0);
    }
    throw InputError(what + " must be a number or a constant expression string");
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
    return *it;
}

Potential parse_potential(const json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": potential must be an object");
    const std::string type = require(j, "type", where).get<std::string>();
    if (type == "zero") return Potential::zero();
    if (type == "delta") {
        const json& d = require(j, "delta", where);
        return Potential::delta(number_or_expression(require(d, "strength", where), where + " delta strength"),
                                number_or_expression(require(d, "position", where), where + " delta position"));
    }
    if (type == "constant") {
        return Potential::constant(number_or_expression(require(j, "value", where), where + " constant value"));
    }
    if (type == "expr") {
        const json& e = require(j, "expr", where);
        if (!e.is_string()) throw InputError(where + ": 'expr' must be a string");
        return Potential::smooth(e.get<std::string>());
    }
    throw InputError(where + ": unknown potential type '" + type + "'");
}

json potential_json(const Potential& p) {
    json j;
    j["type"] = p.type_name();
    const auto& v = p.variant();
    if (const auto* d = std::get_if<DeltaPotential>(&v)) {
        j["delta"] = {{"strength", d->strength}, {"position", d->position}};
    } else if (const auto* c = std::get_if<ConstantPotential>(&v)) {
        j["value"] = c->value;
    } else if (const auto* s = std::get_if<SmoothPotential>(&v)) {
        j["expr"] = s->expression.to_string();
    }
    return j;
}

}  // namespace

GraphSpec parse_graph_spec(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw InputError("graph description must be a JSON object");
        GraphSpec spec;
        const json& vertices = require(doc, "vertices", "graph");
        if (!vertices.is_array()) throw InputError("'vertices' must be an array");
        for (const auto& v : vertices) spec.vertices.push_back(id_string(v, "vertex"));

        const json& edges = require(doc, "edges", "graph");
        if (!edges.is_array()) throw InputError("'edges' must be an array");
        std::size_t ordinal = 0;
        for (const auto& e : edges) {
            const std::string where = "edge #" + std::to_string(ordinal++);
            if (!e.is_object()) throw InputError(where + " must be an object");
            EdgeSpec es;
            es.id = id_string(require(e, "id", where), where + " id");
            es.from = id_string(require(e, "from", where), where + " from");
            es.to = id_string(require(e, "to", where), where + " to");
            es.length = number_or_expression(require(e, "length", where), where + " length");
            if (auto it = e.find("potential"); it != e.end() && !it->is_null()) {
                es.potential = parse_potential(*it, "edge '" + es.id + "'");
            }
            spec.edges.push_back(std::move(es));
        }
        return spec;
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid graph description: ") + e.what());
    }
}

MetricGraph parse_graph(std::string_view json_text) { return build_graph(parse_graph_spec(json_text)); }

MetricGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open graph file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

std::string to_json(const GraphSpec& spec) {
    json doc;
    doc["vertices"] = spec.vertices;
    json edges = json::array();
    for (const auto& e : spec.edges) {
        edges.push_back({{"id", e.id},
                         {"from", e.from},
                         {"to", e.to},
                         {"length", e.length},
                         {"potential", potential_json(e.potential)}});
    }
    doc["edges"] = std::move(edges);
    return doc.dump(2);
}

}  // namespace qgraph
