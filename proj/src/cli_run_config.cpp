#include "osmeval/cli/run_config.hpp"

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/vqa/prompts.hpp"

namespace osmeval::cli {

namespace {

void parse_methods(const json& doc, RunConfig& config, const std::string& context) {
    if (!doc.is_array()) throw ConfigError(context + ": 'methods' must be an array");
    for (const json& m : doc) {
        expect_object(
            m, {"name", "pred_cloud_pattern", "scene_graph_pattern", "direct_answers_pattern",
                "fps"},
            context);
        MethodSpec spec;
        spec.name = require_string(m, "name", context);
        if (spec.name.empty()) throw ConfigError(context + ": method name must not be empty");
        if (m.contains("pred_cloud_pattern")) {
            spec.pred_cloud_pattern = m["pred_cloud_pattern"].get<std::string>();
        }
        if (m.contains("scene_graph_pattern")) {
            spec.scene_graph_pattern = m["scene_graph_pattern"].get<std::string>();
        }
        if (m.contains("direct_answers_pattern")) {
            spec.direct_answers_pattern = m["direct_answers_pattern"].get<std::string>();
        }
        if (m.contains("fps")) spec.fps = require_number(m, "fps", context);
        for (const auto& existing : config.methods) {
            if (existing.name == spec.name) {
                throw ConfigError(context + ": duplicate method name '" + spec.name + "'");
            }
        }
        config.methods.push_back(std::move(spec));
    }
}

void parse_gateway(const json& doc, GatewaySettings& gw, const std::string& context) {
    expect_object(doc,
                  {"endpoint", "dialect", "model_id", "temperature", "judge_temperature",
                   "max_tokens", "api_key_env", "retry", "max_in_flight",
                   "min_request_interval_ms", "max_schema_retries"},
                  context);
    if (doc.contains("endpoint")) gw.endpoint = doc["endpoint"].get<std::string>();
    if (doc.contains("dialect")) gw.dialect = doc["dialect"].get<std::string>();
    if (gw.dialect != "chat_completions") {
        throw ConfigError(context + ": unknown gateway dialect '" + gw.dialect +
                          "' (supported: chat_completions)");
    }
    if (doc.contains("model_id")) gw.model_id = doc["model_id"].get<std::string>();
    if (doc.contains("temperature")) gw.temperature = doc["temperature"].get<double>();
    if (doc.contains("judge_temperature")) {
        gw.judge_temperature = doc["judge_temperature"].get<double>();
    }
    if (doc.contains("max_tokens")) gw.max_tokens = doc["max_tokens"].get<int>();
    if (doc.contains("api_key_env")) gw.api_key_env = doc["api_key_env"].get<std::string>();
    if (doc.contains("retry")) {
        const json& retry = doc["retry"];
        expect_object(retry, {"max_attempts", "base_delay_ms", "factor", "jitter"}, context);
        if (retry.contains("max_attempts")) {
            gw.retry.max_attempts = retry["max_attempts"].get<int>();
        }
        if (retry.contains("base_delay_ms")) {
            gw.retry.base_delay = std::chrono::milliseconds(retry["base_delay_ms"].get<int>());
        }
        if (retry.contains("factor")) gw.retry.factor = retry["factor"].get<double>();
        if (retry.contains("jitter")) gw.retry.jitter = retry["jitter"].get<double>();
    }
    if (doc.contains("max_in_flight")) gw.max_in_flight = doc["max_in_flight"].get<int>();
    if (doc.contains("min_request_interval_ms")) {
        gw.min_request_interval_ms = doc["min_request_interval_ms"].get<int>();
    }
    if (doc.contains("max_schema_retries")) {
        gw.max_schema_retries = doc["max_schema_retries"].get<int>();
    }
}

void parse_seg(const json& doc, SegEvalSettings& seg, const std::string& context) {
    expect_object(doc, {"radius", "matcher", "similarity_threshold", "label_field"}, context);
    if (doc.contains("radius")) seg.radius = doc["radius"].get<double>();
    if (seg.radius <= 0.0) throw ConfigError(context + ": seg_eval.radius must be positive");
    if (doc.contains("matcher")) seg.matcher = doc["matcher"].get<std::string>();
    if (seg.matcher != "exact" && seg.matcher != "embedding") {
        throw ConfigError(context + ": seg_eval.matcher must be 'exact' or 'embedding'");
    }
    if (doc.contains("similarity_threshold")) {
        seg.similarity_threshold = doc["similarity_threshold"].get<double>();
    }
    if (doc.contains("label_field")) seg.label_field = doc["label_field"].get<std::string>();
}

void parse_vqa(const json& doc, VqaSettings& vqa_settings, const RunConfig& config,
               const std::string& context) {
    expect_object(doc,
                  {"n_total", "seed", "max_object_share", "quotas", "sampling",
                   "include_functional", "prompt_overrides"},
                  context);
    if (doc.contains("n_total")) {
        vqa_settings.n_total = doc["n_total"].get<int>();
        if (*vqa_settings.n_total < 0) throw ConfigError(context + ": vqa.n_total must be >= 0");
    }
    if (doc.contains("seed")) vqa_settings.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("max_object_share")) {
        vqa_settings.max_object_share = doc["max_object_share"].get<double>();
    }
    if (doc.contains("quotas")) {
        const json& quotas = doc["quotas"];
        for (vqa::QACategory category : vqa::kAllCategories) {
            vqa_settings.quotas.ratios[static_cast<std::size_t>(category)] =
                require_number(quotas, vqa::category_name(category), context);
        }
        vqa_settings.quotas.validate();
    }
    if (doc.contains("sampling")) {
        const json& sampling = doc["sampling"];
        expect_object(sampling, {"mode", "value"}, context);
        const std::string mode = require_string(sampling, "mode", context);
        if (mode == "stride") {
            vqa_settings.sampling.mode = vqa::SamplingPolicy::Mode::Stride;
        } else if (mode == "count") {
            vqa_settings.sampling.mode = vqa::SamplingPolicy::Mode::Count;
        } else {
            throw ConfigError(context + ": vqa.sampling.mode must be 'stride' or 'count'");
        }
        vqa_settings.sampling.value = static_cast<int>(require_number(sampling, "value", context));
    }
    if (doc.contains("include_functional")) {
        vqa_settings.include_functional = doc["include_functional"].get<bool>();
    }
    if (doc.contains("prompt_overrides")) {
        std::filesystem::path p = doc["prompt_overrides"].get<std::string>();
        vqa_settings.prompt_overrides = p.is_absolute() ? p : config.config_dir / p;
    }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = parse_json_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const std::string context = path.string();

    RunConfig config;
    config.config_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    try {
        expect_object(doc,
                      {"manifest", "output_dir", "methods", "gateway", "seg_eval", "vqa",
                       "report", "workers"},
                      context);
        const std::string manifest = require_string(doc, "manifest", context);
        config.manifest = std::filesystem::path(manifest).is_absolute()
                              ? std::filesystem::path(manifest)
                              : config.config_dir / manifest;
        const std::string output_dir = require_string(doc, "output_dir", context);
        config.output_dir = std::filesystem::path(output_dir).is_absolute()
                                ? std::filesystem::path(output_dir)
                                : config.config_dir / output_dir;

        if (doc.contains("methods")) parse_methods(doc["methods"], config, context);
        if (doc.contains("gateway")) parse_gateway(doc["gateway"], config.gateway, context);
        if (doc.contains("seg_eval")) parse_seg(doc["seg_eval"], config.seg, context);
        if (doc.contains("vqa")) parse_vqa(doc["vqa"], config.vqa, config, context);
        if (doc.contains("report")) {
            expect_object(doc["report"], {"reference_condition"}, context);
            if (doc["report"].contains("reference_condition")) {
                config.report.reference_condition =
                    doc["report"]["reference_condition"].get<std::string>();
            }
            if (config.report.reference_condition != "auto" &&
                !condition_from_name(config.report.reference_condition)) {
                throw ConfigError(context + ": unknown reference_condition '" +
                                  config.report.reference_condition + "'");
            }
        }
        if (doc.contains("workers")) config.workers = doc["workers"].get<int>();
        if (config.workers < 1) throw ConfigError(context + ": workers must be >= 1");
    } catch (const SchemaError& e) {
        throw ConfigError(e.what());
    }
    return config;
}

std::filesystem::path resolve_pattern(const RunConfig& config, const std::string& pattern,
                                      const std::string& method, const std::string& scene,
                                      std::string_view condition) {
    if (pattern.empty()) return {};
    const std::string expanded = vqa::render_template(
        pattern, {{"method", method}, {"scene", scene}, {"condition", std::string(condition)}});
    std::filesystem::path p(expanded);
    return p.is_absolute() ? p : config.config_dir / p;
}

int resolve_n_total(const VqaSettings& settings, const DatasetManifest& manifest) {
    if (settings.n_total) return *settings.n_total;
    for (const auto& scene : manifest.scenes) {
        if (scene.sequence_for(ConditionKind::Baseline)) return 184;
    }
    return 76;
}

}  // namespace osmeval::cli
