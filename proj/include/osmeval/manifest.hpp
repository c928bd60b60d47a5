#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "osmeval/condition.hpp"

namespace osmeval {

/// One recorded sequence of a scene under a specific condition.
struct SequenceSpec {
    ConditionKind condition = ConditionKind::Baseline;
    std::filesystem::path gt_cloud;
    std::optional<std::filesystem::path> pred_cloud;
    std::optional<std::filesystem::path> scene_graph;
    std::optional<std::filesystem::path> keyframes_dir;
    std::optional<std::filesystem::path> scenario;
    std::optional<double> method_fps;  // metadata only, never measured here
};

struct SceneEntry {
    std::string scene_id;
    std::vector<SequenceSpec> sequences;

    const SequenceSpec* sequence_for(ConditionKind kind) const;
};

struct DatasetManifest {
    std::string dataset_name;
    std::filesystem::path class_vocabulary_path;
    std::vector<SceneEntry> scenes;
    std::filesystem::path root;  // directory the manifest was loaded from
};

/// Parse a dataset manifest. Paths are resolved relative to the manifest
/// file; structural invariants (unique scene ids, one sequence per
/// condition, at least one sequence) are enforced here. File existence is
/// checked by validate_sequence, not here.
DatasetManifest load_manifest(const std::filesystem::path& path);

enum class IssueCode {
    MissingGtCloud,
    GtLoadFailed,
    NonFinitePoint,
    MissingPrediction,
    PredLoadFailed,
    SceneGraphLoadFailed,
    KeyframesMissing,
    KeyframesEmpty,
    ScenarioLoadFailed,
    UnfilledLightPlaceholder,
    MissingVocabulary,
};

std::string_view issue_code_name(IssueCode code);

/// One structured, non-fatal validation finding.
struct Issue {
    IssueCode code;
    std::string message;
};

struct ValidateOptions {
    /// Flag sequences queued for segmentation evaluation without predictions.
    bool require_prediction = false;
    std::string label_field = "class_id";
    int class_count = 0;
};

/// Check that every file a sequence references loads and holds its
/// invariants. Pure: same inputs produce the same issue list.
std::vector<Issue> validate_sequence(const SequenceSpec& spec, const ValidateOptions& options = {});

}  // namespace osmeval
