#include "osmeval/manifest.hpp"

#include <cmath>
#include <unordered_set>

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/ply_io.hpp"
#include "osmeval/scenario.hpp"
#include "osmeval/scene_graph.hpp"

namespace osmeval {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : base / p;
}

std::optional<std::filesystem::path> optional_path(const json& obj, std::string_view key,
                                                   const std::filesystem::path& base,
                                                   const std::string& context) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj[std::string(key)];
    if (!v.is_string()) {
        throw SchemaError(context + ": field '" + std::string(key) + "' must be a string path");
    }
    return resolve(base, v.get<std::string>());
}

}  // namespace

const SequenceSpec* SceneEntry::sequence_for(ConditionKind kind) const {
    for (const auto& seq : sequences) {
        if (seq.condition == kind) return &seq;
    }
    return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    const std::string context = path.string();
    expect_object(doc, {"dataset_name", "class_vocabulary", "scenes"}, context);

    DatasetManifest manifest;
    manifest.root = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    manifest.dataset_name = require_string(doc, "dataset_name", context);
    manifest.class_vocabulary_path =
        resolve(manifest.root, require_string(doc, "class_vocabulary", context));

    const json& scenes = require_field(doc, "scenes", context);
    if (!scenes.is_array() || scenes.empty()) {
        throw SchemaError(context + ": 'scenes' must be a non-empty array");
    }
    std::unordered_set<std::string> scene_ids;
    for (const json& s : scenes) {
        expect_object(s, {"scene_id", "sequences"}, context);
        SceneEntry entry;
        entry.scene_id = require_string(s, "scene_id", context);
        if (!scene_ids.insert(entry.scene_id).second) {
            throw SchemaError(context + ": duplicate scene_id '" + entry.scene_id + "'");
        }
        const json& sequences = require_field(s, "sequences", context);
        if (!sequences.is_array() || sequences.empty()) {
            throw SchemaError(context + ": scene '" + entry.scene_id +
                              "' must list at least one sequence");
        }
        std::unordered_set<std::string> seen_conditions;
        for (const json& q : sequences) {
            const std::string seq_context = context + " (scene '" + entry.scene_id + "')";
            expect_object(q,
                          {"condition", "gt_cloud", "pred_cloud", "scene_graph", "keyframes_dir",
                           "scenario", "method_fps"},
                          seq_context);
            SequenceSpec spec;
            const std::string cond = require_string(q, "condition", seq_context);
            const auto kind = condition_from_name(cond);
            if (!kind) {
                throw SchemaError(seq_context + ": unknown condition '" + cond + "'");
            }
            spec.condition = *kind;
            if (!seen_conditions.insert(cond).second) {
                throw SchemaError(seq_context + ": more than one sequence for condition '" +
                                  cond + "'");
            }
            spec.gt_cloud = resolve(manifest.root, require_string(q, "gt_cloud", seq_context));
            spec.pred_cloud = optional_path(q, "pred_cloud", manifest.root, seq_context);
            spec.scene_graph = optional_path(q, "scene_graph", manifest.root, seq_context);
            spec.keyframes_dir = optional_path(q, "keyframes_dir", manifest.root, seq_context);
            spec.scenario = optional_path(q, "scenario", manifest.root, seq_context);
            if (q.contains("method_fps")) {
                spec.method_fps = require_number(q, "method_fps", seq_context);
            }
            entry.sequences.push_back(std::move(spec));
        }
        manifest.scenes.push_back(std::move(entry));
    }
    return manifest;
}

std::string_view issue_code_name(IssueCode code) {
    switch (code) {
        case IssueCode::MissingGtCloud: return "MissingGtCloud";
        case IssueCode::GtLoadFailed: return "GtLoadFailed";
        case IssueCode::NonFinitePoint: return "NonFinitePoint";
        case IssueCode::MissingPrediction: return "MissingPrediction";
        case IssueCode::PredLoadFailed: return "PredLoadFailed";
        case IssueCode::SceneGraphLoadFailed: return "SceneGraphLoadFailed";
        case IssueCode::KeyframesMissing: return "KeyframesMissing";
        case IssueCode::KeyframesEmpty: return "KeyframesEmpty";
        case IssueCode::ScenarioLoadFailed: return "ScenarioLoadFailed";
        case IssueCode::UnfilledLightPlaceholder: return "UnfilledLightPlaceholder";
        case IssueCode::MissingVocabulary: return "MissingVocabulary";
    }
    return "Unknown";
}

namespace {

bool cloud_is_finite(const LabeledPointCloud& cloud) {
    for (const auto& p : cloud.points) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) return false;
    }
    return true;
}

bool dir_has_images(const std::filesystem::path& dir) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") return true;
    }
    return false;
}

}  // namespace

std::vector<Issue> validate_sequence(const SequenceSpec& spec, const ValidateOptions& options) {
    std::vector<Issue> issues;
    const auto add = [&issues](IssueCode code, std::string message) {
        issues.push_back({code, std::move(message)});
    };

    if (!std::filesystem::exists(spec.gt_cloud)) {
        add(IssueCode::MissingGtCloud, "ground-truth cloud not found: " + spec.gt_cloud.string());
    } else {
        try {
            PlyReadOptions read;
            read.label_field = options.label_field;
            read.class_count = options.class_count;
            const LabeledPointCloud gt = load_point_cloud(spec.gt_cloud, read);
            if (!cloud_is_finite(gt)) {
                add(IssueCode::NonFinitePoint,
                    "ground-truth cloud has non-finite coordinates: " + spec.gt_cloud.string());
            }
        } catch (const Error& e) {
            add(IssueCode::GtLoadFailed, e.what());
        }
    }

    if (spec.pred_cloud) {
        if (!std::filesystem::exists(*spec.pred_cloud)) {
            add(IssueCode::MissingPrediction,
                "predicted cloud not found: " + spec.pred_cloud->string());
        } else {
            try {
                PlyReadOptions read;
                read.label_field = options.label_field;
                read.class_count = options.class_count;
                const LabeledPointCloud pred = load_point_cloud(*spec.pred_cloud, read);
                if (!cloud_is_finite(pred)) {
                    add(IssueCode::NonFinitePoint,
                        "predicted cloud has non-finite coordinates: " +
                            spec.pred_cloud->string());
                }
            } catch (const Error& e) {
                add(IssueCode::PredLoadFailed, e.what());
            }
        }
    } else if (options.require_prediction) {
        add(IssueCode::MissingPrediction,
            "sequence queued for segmentation evaluation has no predicted cloud");
    }

    if (spec.scene_graph) {
        try {
            load_scene_graph(*spec.scene_graph);
        } catch (const Error& e) {
            add(IssueCode::SceneGraphLoadFailed, e.what());
        }
    }

    if (spec.keyframes_dir) {
        if (!std::filesystem::is_directory(*spec.keyframes_dir)) {
            add(IssueCode::KeyframesMissing,
                "keyframes directory not found: " + spec.keyframes_dir->string());
        } else if (!dir_has_images(*spec.keyframes_dir)) {
            add(IssueCode::KeyframesEmpty,
                "keyframes directory has no images: " + spec.keyframes_dir->string());
        }
    }

    if (spec.scenario) {
        try {
            const ConditionConfig config = load_condition_config(*spec.scenario);
            for (auto& issue : validate_condition_config(config)) {
                issues.push_back(std::move(issue));
            }
        } catch (const Error& e) {
            add(IssueCode::ScenarioLoadFailed, e.what());
        }
    }

    return issues;
}

}  // namespace osmeval
