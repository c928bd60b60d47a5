#include "osmeval/vqa/description.hpp"

#include <algorithm>
#include <set>

#include "osmeval/errors.hpp"
#include "osmeval/label_match.hpp"

namespace osmeval::vqa {

using nlohmann::json;

llm::JsonSchema scene_description_schema() {
    llm::JsonSchema schema;
    schema.id = "scene_description.v1";
    llm::FieldSpec narrative{"narrative", llm::FieldKind::String};
    llm::FieldSpec objects{"objects", llm::FieldKind::ObjectArray};
    llm::FieldSpec name{"name", llm::FieldKind::String};
    name.non_empty = true;
    llm::FieldSpec attributes{"attributes", llm::FieldKind::Object};
    attributes.required = false;
    llm::FieldSpec relations{"relations", llm::FieldKind::ObjectArray};
    relations.required = false;
    relations.item_fields = {{"relation", llm::FieldKind::String},
                             {"other", llm::FieldKind::String}};
    objects.item_fields = {name, attributes, relations};
    schema.fields = {narrative, objects};
    return schema;
}

SceneDescription describe_frame(const LlmSession& session, const FrameSample& frame) {
    if (!std::filesystem::exists(frame.image_path)) {
        throw IoError("keyframe image not found: " + frame.image_path.string());
    }
    const std::map<std::string, std::string> vars = {
        {"frame_id", std::to_string(frame.frame_id)},
        {"scene_id", frame.scene_id},
        {"condition", std::string(condition_name(frame.condition))},
    };
    json doc;
    try {
        doc = session.gateway->complete_structured(session.make_request(
            kSceneDescriptionTemplate, vars, {frame.image_path}, scene_description_schema()));
    } catch (const llm::StructuredOutputError& e) {
        throw llm::StructuredOutputError(
            "frame " + std::to_string(frame.frame_id) + ": " + e.what(), e.raw_text());
    }

    SceneDescription desc;
    desc.frame_id = frame.frame_id;
    desc.narrative = doc["narrative"].get<std::string>();
    for (const json& obj : doc["objects"]) {
        ObjectMention mention;
        mention.name = obj["name"].get<std::string>();
        if (obj.contains("attributes")) {
            for (const auto& [key, value] : obj["attributes"].items()) {
                mention.attributes[key] =
                    value.is_string() ? value.get<std::string>() : value.dump();
            }
        }
        if (obj.contains("relations")) {
            for (const json& rel : obj["relations"]) {
                mention.relations.emplace_back(rel["relation"].get<std::string>(),
                                               rel["other"].get<std::string>());
            }
        }
        desc.objects.push_back(std::move(mention));
    }
    return desc;
}

UnifiedDescription aggregate_descriptions(std::span<const SceneDescription> descriptions) {
    if (descriptions.empty()) {
        throw ContractViolation("cannot aggregate an empty description list");
    }
    std::vector<const SceneDescription*> ordered;
    ordered.reserve(descriptions.size());
    for (const auto& d : descriptions) ordered.push_back(&d);
    std::sort(ordered.begin(), ordered.end(),
              [](const SceneDescription* a, const SceneDescription* b) {
                  return a->frame_id < b->frame_id;
              });

    struct MergedObject {
        std::string display_name;
        // attribute key -> distinct values in first-seen order
        std::map<std::string, std::vector<std::string>> attributes;
        std::set<std::pair<std::string, std::string>> relations;
    };
    std::map<std::string, MergedObject> merged;  // keyed by normalized name

    UnifiedDescription unified;
    for (const SceneDescription* desc : ordered) {
        unified.frame_ids.push_back(desc->frame_id);
        for (const auto& obj : desc->objects) {
            const std::string key = normalize_label(obj.name);
            if (key.empty()) continue;
            MergedObject& m = merged[key];
            if (m.display_name.empty()) m.display_name = key;
            for (const auto& [attr, value] : obj.attributes) {
                auto& values = m.attributes[attr];
                if (std::find(values.begin(), values.end(), value) == values.end()) {
                    values.push_back(value);
                }
            }
            for (const auto& rel : obj.relations) {
                m.relations.insert({rel.first, normalize_label(rel.second)});
            }
        }
    }

    std::string text = "Objects:\n";
    for (const auto& [key, m] : merged) {
        unified.object_names.push_back(key);
        text += "- " + m.display_name;
        for (const auto& [attr, values] : m.attributes) {
            text += " | " + attr + ": ";
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) text += "|";
                text += values[i];
            }
            if (values.size() > 1) text += " (conflicting)";
        }
        for (const auto& rel : m.relations) {
            text += " | " + rel.first + ": " + rel.second;
        }
        text += "\n";
    }
    text += "Narratives:\n";
    for (const SceneDescription* desc : ordered) {
        text += "[frame " + std::to_string(desc->frame_id) + "] " + desc->narrative + "\n";
    }
    unified.text = std::move(text);
    return unified;
}

}  // namespace osmeval::vqa
