#include "osmeval/scene_graph.hpp"

#include <unordered_set>

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"

namespace osmeval {

const SceneGraphNode* SceneGraph::find_node(const std::string& node_id) const {
    for (const auto& node : nodes) {
        if (node.node_id == node_id) return &node;
    }
    return nullptr;
}

SceneGraph scene_graph_from_json(const json& doc, const std::string& context) {
    expect_object(doc, {"nodes", "edges"}, context);
    const json& nodes = require_field(doc, "nodes", context);
    const json& edges = require_field(doc, "edges", context);
    if (!nodes.is_array() || !edges.is_array()) {
        throw SchemaError(context + ": 'nodes' and 'edges' must be arrays");
    }

    SceneGraph graph;
    std::unordered_set<std::string> ids;
    for (const json& n : nodes) {
        expect_object(n, {"node_id", "label", "caption", "attributes", "centroid"}, context);
        SceneGraphNode node;
        node.node_id = require_string(n, "node_id", context);
        node.label = require_string(n, "label", context);
        if (n.contains("caption")) node.caption = n["caption"].get<std::string>();
        if (n.contains("attributes")) {
            const json& attrs = n["attributes"];
            if (!attrs.is_object()) throw SchemaError(context + ": 'attributes' must be an object");
            for (const auto& [key, value] : attrs.items()) {
                node.attributes[key] =
                    value.is_string() ? value.get<std::string>() : value.dump();
            }
        }
        if (n.contains("centroid")) {
            const json& c = n["centroid"];
            if (!c.is_array() || c.size() != 3) {
                throw SchemaError(context + ": 'centroid' must be an array of 3 numbers");
            }
            node.centroid = {{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()}};
        }
        if (!ids.insert(node.node_id).second) {
            throw SchemaError(context + ": duplicate node id '" + node.node_id + "'");
        }
        graph.nodes.push_back(std::move(node));
    }
    for (const json& e : edges) {
        expect_object(e, {"source", "target", "relation"}, context);
        SceneGraphEdge edge;
        edge.source = require_string(e, "source", context);
        edge.target = require_string(e, "target", context);
        edge.relation = require_string(e, "relation", context);
        if (!ids.count(edge.source)) {
            throw SchemaError(context + ": edge references unknown node '" + edge.source + "'");
        }
        if (!ids.count(edge.target)) {
            throw SchemaError(context + ": edge references unknown node '" + edge.target + "'");
        }
        graph.edges.push_back(std::move(edge));
    }
    return graph;
}

json scene_graph_to_json(const SceneGraph& graph) {
    json nodes = json::array();
    for (const auto& node : graph.nodes) {
        json n;
        n["node_id"] = node.node_id;
        n["label"] = node.label;
        if (!node.caption.empty()) n["caption"] = node.caption;
        if (!node.attributes.empty()) n["attributes"] = node.attributes;
        if (node.centroid) {
            n["centroid"] = {(*node.centroid)[0], (*node.centroid)[1], (*node.centroid)[2]};
        }
        nodes.push_back(std::move(n));
    }
    json edges = json::array();
    for (const auto& edge : graph.edges) {
        edges.push_back({{"source", edge.source}, {"target", edge.target},
                         {"relation", edge.relation}});
    }
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

SceneGraph load_scene_graph(const std::filesystem::path& path) {
    return scene_graph_from_json(parse_json_file(path), path.string());
}

void save_scene_graph(const std::filesystem::path& path, const SceneGraph& graph) {
    write_text_file(path, canonical_dump(scene_graph_to_json(graph)));
}

std::string serialize_scene_graph(const SceneGraph& graph) {
    std::string out = "Nodes:\n";
    for (const auto& node : graph.nodes) {
        out += "- " + node.node_id + ": " + node.label;
        for (const auto& [key, value] : node.attributes) {
            out += " | " + key + ": " + value;
        }
        if (!node.caption.empty()) out += " | caption: " + node.caption;
        out += "\n";
    }
    out += "Edges:\n";
    for (const auto& edge : graph.edges) {
        out += "- " + edge.source + " -[" + edge.relation + "]-> " + edge.target + "\n";
    }
    return out;
}

}  // namespace osmeval
