#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osmeval/vqa/frames.hpp"
#include "osmeval/vqa/session.hpp"

namespace osmeval::vqa {

struct ObjectMention {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<std::pair<std::string, std::string>> relations;  // (relation, other object)
};

struct SceneDescription {
    int frame_id = -1;
    std::string narrative;
    std::vector<ObjectMention> objects;
};

/// Schema the LVLM description reply must satisfy.
llm::JsonSchema scene_description_schema();

/// Ask the LVLM for a structured description of one keyframe.
SceneDescription describe_frame(const LlmSession& session, const FrameSample& frame);

/// Text form consumed by question generation and validation: objects merged
/// across frames (union by normalized name; conflicting attribute values
/// listed as value1|value2 and flagged) plus per-frame narratives with
/// provenance markers.
struct UnifiedDescription {
    std::string text;
    std::vector<int> frame_ids;
    /// Normalized names of all objects mentioned by any frame.
    std::vector<std::string> object_names;
};

UnifiedDescription aggregate_descriptions(std::span<const SceneDescription> descriptions);

}  // namespace osmeval::vqa
