#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "osmeval/llm/gateway.hpp"
#include "osmeval/manifest.hpp"
#include "osmeval/vqa/frames.hpp"
#include "osmeval/vqa/question.hpp"

namespace osmeval::cli {

/// One system under test. Patterns may contain {method}, {scene} and
/// {condition} placeholders and resolve relative to the config file.
struct MethodSpec {
    std::string name;
    std::string pred_cloud_pattern;
    std::string scene_graph_pattern;
    std::string direct_answers_pattern;  // optional: SUT-provided answers
    std::optional<double> fps;           // pass-through metadata
};

struct GatewaySettings {
    std::string endpoint;  // empty: replay-only runs
    std::string dialect = "chat_completions";  // wire dialect of the endpoint
    std::string model_id = "gemini-2.0-flash";
    double temperature = 0.0;
    double judge_temperature = 0.0;
    int max_tokens = 1024;
    std::string api_key_env = "OSMEVAL_API_KEY";
    llm::RetryPolicy retry;
    int max_in_flight = 4;
    int min_request_interval_ms = 0;
    int max_schema_retries = 2;
};

struct SegEvalSettings {
    double radius = 0.05;  // meters
    std::string matcher = "exact";  // "exact" | "embedding"
    double similarity_threshold = 0.7;
    std::string label_field = "class_id";
};

struct VqaSettings {
    /// Questions per scene. Unset = dataset-sensitive default: 184 when the
    /// manifest has baseline sequences, 76 otherwise.
    std::optional<int> n_total;
    std::uint64_t seed = 0;
    double max_object_share = 0.3;
    vqa::CategoryQuota quotas = vqa::CategoryQuota::defaults();
    vqa::SamplingPolicy sampling;
    bool include_functional = false;
    std::optional<std::filesystem::path> prompt_overrides;
};

struct ReportSettings {
    /// "auto" picks Baseline when the dataset has baseline sequences and
    /// NominalLights otherwise; or name a condition explicitly.
    std::string reference_condition = "auto";
};

struct RunConfig {
    std::filesystem::path manifest;
    std::filesystem::path output_dir;
    std::vector<MethodSpec> methods;
    GatewaySettings gateway;
    SegEvalSettings seg;
    VqaSettings vqa;
    ReportSettings report;
    int workers = 1;
    std::filesystem::path config_dir;  // directory of the config file
};

/// Strict parse: unknown keys anywhere are rejected.
RunConfig load_run_config(const std::filesystem::path& path);

/// Expand {method}/{scene}/{condition} placeholders and resolve against the
/// config directory. Empty pattern yields an empty path.
std::filesystem::path resolve_pattern(const RunConfig& config, const std::string& pattern,
                                      const std::string& method, const std::string& scene,
                                      std::string_view condition);

/// Configured n_total, or the dataset-sensitive default.
int resolve_n_total(const VqaSettings& settings, const DatasetManifest& manifest);

}  // namespace osmeval::cli
