#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace osmeval {

struct SceneGraphNode {
    std::string node_id;
    std::string label;
    std::string caption;
    std::map<std::string, std::string> attributes;
    std::optional<std::array<double, 3>> centroid;
};

struct SceneGraphEdge {
    std::string source;
    std::string target;
    std::string relation;
};

/// Node/edge document produced by a method under test; context for QA
/// answering. Node ids are unique and edges reference existing nodes.
struct SceneGraph {
    std::vector<SceneGraphNode> nodes;
    std::vector<SceneGraphEdge> edges;

    const SceneGraphNode* find_node(const std::string& node_id) const;
};

SceneGraph scene_graph_from_json(const nlohmann::json& doc, const std::string& context);
nlohmann::json scene_graph_to_json(const SceneGraph& graph);

SceneGraph load_scene_graph(const std::filesystem::path& path);
void save_scene_graph(const std::filesystem::path& path, const SceneGraph& graph);

/// Stable plain-text rendering embedded into answering prompts.
std::string serialize_scene_graph(const SceneGraph& graph);

}  // namespace osmeval
