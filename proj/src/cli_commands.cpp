#include "osmeval/cli/commands.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "osmeval/association.hpp"
#include "osmeval/cli/render.hpp"
#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/label_match.hpp"
#include "osmeval/llm/transport_http.hpp"
#include "osmeval/manifest.hpp"
#include "osmeval/parallel.hpp"
#include "osmeval/ply_io.hpp"
#include "osmeval/scenario.hpp"
#include "osmeval/scene_graph.hpp"
#include "osmeval/vqa/accuracy.hpp"
#include "osmeval/vqa/answering.hpp"
#include "osmeval/vqa/description.hpp"
#include "osmeval/vqa/judging.hpp"
#include "osmeval/vqa/qa_store.hpp"

namespace osmeval::cli {

namespace {

namespace fs = std::filesystem;

std::string cond_str(ConditionKind kind) { return std::string(condition_name(kind)); }

fs::path seg_result_path(const RunConfig& config, const std::string& method,
                         const std::string& scene, ConditionKind condition) {
    return config.output_dir / "seg" / method / (scene + "__" + cond_str(condition) + ".json");
}

fs::path qa_dir(const RunConfig& config, const std::string& scene, ConditionKind condition) {
    return config.output_dir / "qa" / scene / cond_str(condition);
}

fs::path answers_dir(const RunConfig& config, const std::string& method,
                     const std::string& scene, ConditionKind condition) {
    return config.output_dir / "answers" / method / scene / cond_str(condition);
}

vqa::PromptLibrary make_prompts(const RunConfig& config) {
    if (config.vqa.prompt_overrides) {
        return vqa::PromptLibrary::with_overrides(*config.vqa.prompt_overrides);
    }
    return vqa::PromptLibrary::builtin();
}

vqa::LlmCallOptions call_options(const RunConfig& config, bool judging) {
    vqa::LlmCallOptions options;
    options.model_id = config.gateway.model_id;
    options.temperature = judging ? config.gateway.judge_temperature
                                  : config.gateway.temperature;
    options.max_tokens = config.gateway.max_tokens;
    return options;
}

LabelMatcher make_matcher(const RunConfig& config) {
    if (config.seg.matcher == "embedding") {
        return LabelMatcher(std::make_shared<HashedEmbeddingProvider>(),
                            config.seg.similarity_threshold);
    }
    return LabelMatcher();
}

std::vector<std::string> read_label_lines(const fs::path& path) {
    std::vector<std::string> names;
    std::string text = read_text_file(path);
    std::string line;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            names.push_back(line);
            line.clear();
        } else {
            line.push_back(text[i]);
        }
    }
    while (!names.empty() && names.back().empty()) names.pop_back();
    return names;
}

/// Load a predicted cloud. When a "<name>.labels.txt" sidecar exists next
/// to it, the cloud's integer labels index that open-vocabulary list and
/// are matched into the GT vocabulary; otherwise they are taken as GT class
/// ids directly (out-of-range ids become void).
LabeledPointCloud load_prediction(const fs::path& path, const SegEvalSettings& seg,
                                  const ClassVocabulary& vocab, const LabelMatcher& matcher) {
    fs::path sidecar = path;
    sidecar.replace_extension(".labels.txt");
    PlyReadOptions options;
    options.label_field = seg.label_field;
    if (fs::exists(sidecar)) {
        options.class_count = 0;
        LabeledPointCloud cloud = load_point_cloud(path, options);
        const std::vector<std::string> names = read_label_lines(sidecar);
        std::vector<std::int32_t> mapping(names.size(), kVoidClass);
        for (std::size_t i = 0; i < names.size(); ++i) {
            mapping[i] = matcher.match(names[i], vocab).value_or(kVoidClass);
        }
        for (auto& id : cloud.class_ids) {
            id = (id >= 0 && static_cast<std::size_t>(id) < mapping.size())
                     ? mapping[static_cast<std::size_t>(id)]
                     : kVoidClass;
        }
        return cloud;
    }
    options.class_count = vocab.size();
    return load_point_cloud(path, options);
}

bool issue_is_fatal(IssueCode code) {
    switch (code) {
        case IssueCode::MissingPrediction:
        case IssueCode::UnfilledLightPlaceholder:
            return false;
        default:
            return true;
    }
}

int run_guarded(const CommandContext& ctx, const char* command, int (*body)(const CommandContext&)) {
    try {
        return body(ctx);
    } catch (const ConfigError& e) {
        ctx.out() << command << ": config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const Error& e) {
        ctx.out() << command << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace

std::unique_ptr<llm::Gateway> make_gateway(const CommandContext& ctx) {
    llm::GatewayConfig gateway_config;
    gateway_config.retry = ctx.config.gateway.retry;
    gateway_config.max_in_flight = ctx.config.gateway.max_in_flight;
    gateway_config.min_request_interval =
        std::chrono::milliseconds(ctx.config.gateway.min_request_interval_ms);
    gateway_config.max_schema_retries = ctx.config.gateway.max_schema_retries;

    if (ctx.replay_dir) {
        gateway_config.store_dir = *ctx.replay_dir;
        gateway_config.mode = ctx.record ? llm::GatewayMode::Record : llm::GatewayMode::Replay;
    } else {
        gateway_config.mode = llm::GatewayMode::Live;
    }

    std::shared_ptr<llm::Transport> transport = ctx.transport_override;
    if (gateway_config.mode != llm::GatewayMode::Replay && !transport) {
        if (ctx.config.gateway.endpoint.empty()) {
            throw ConfigError(
                "no gateway endpoint configured; set gateway.endpoint or run with --replay-dir");
        }
        // "chat_completions" is the only dialect built in; the config parser
        // rejects anything else.
        llm::HttpTransportConfig http;
        http.base_url = ctx.config.gateway.endpoint;
        http.api_key_env = ctx.config.gateway.api_key_env;
        transport = std::make_shared<llm::ChatCompletionsTransport>(http);
    }
    return std::make_unique<llm::Gateway>(gateway_config, std::move(transport));
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const CommandContext& ctx) {
    return run_guarded(ctx, "validate", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);

        int class_count = 0;
        bool fatal = false;
        try {
            class_count = load_vocabulary(manifest.class_vocabulary_path).size();
        } catch (const Error& e) {
            c.out() << "[" << issue_code_name(IssueCode::MissingVocabulary) << "] " << e.what()
                    << "\n";
            fatal = true;
        }

        ValidateOptions options;
        options.label_field = c.config.seg.label_field;
        options.class_count = class_count;

        std::map<std::string, int> resolved_predictions;
        for (const auto& method : c.config.methods) {
            if (!method.pred_cloud_pattern.empty()) resolved_predictions[method.name] = 0;
        }

        for (const auto& scene : manifest.scenes) {
            for (const auto& seq : scene.sequences) {
                for (const auto& issue : validate_sequence(seq, options)) {
                    const bool is_fatal = issue_is_fatal(issue.code);
                    fatal = fatal || is_fatal;
                    c.out() << (is_fatal ? "[error] " : "[warn]  ") << scene.scene_id << "/"
                            << condition_name(seq.condition) << " "
                            << issue_code_name(issue.code) << ": " << issue.message << "\n";
                }
                // Predictions the configured methods are expected to provide.
                for (const auto& method : c.config.methods) {
                    if (method.pred_cloud_pattern.empty()) continue;
                    const fs::path pred =
                        resolve_pattern(c.config, method.pred_cloud_pattern, method.name,
                                        scene.scene_id, condition_name(seq.condition));
                    if (fs::exists(pred)) {
                        ++resolved_predictions[method.name];
                    } else {
                        c.out() << "[warn]  " << scene.scene_id << "/"
                                << condition_name(seq.condition) << " MissingPrediction: method '"
                                << method.name << "' has no prediction at " << pred.string()
                                << "\n";
                    }
                }
            }
        }
        // A method whose pattern matches nothing at all is a config defect,
        // not a per-sequence gap.
        for (const auto& [method, count] : resolved_predictions) {
            if (count == 0) {
                fatal = true;
                c.out() << "[error] method '" << method
                        << "': pred_cloud_pattern resolves to no existing file for any "
                           "sequence\n";
            }
        }
        c.out() << "validate: " << (fatal ? "FAILED" : "ok") << "\n";
        return fatal ? kExitFailure : kExitOk;
    });
}

// ---------------------------------------------------------------------------
// seg-eval
// ---------------------------------------------------------------------------

namespace {

struct SegWorkItem {
    std::string method;
    std::string scene;
    ConditionKind condition = ConditionKind::Baseline;
    fs::path pred_path;
    fs::path gt_path;
};

json seg_params_json(const SegEvalSettings& seg) {
    return json{{"radius", seg.radius},
                {"matcher", seg.matcher},
                {"similarity_threshold", seg.similarity_threshold},
                {"label_field", seg.label_field}};
}

}  // namespace

int cmd_seg_eval(const CommandContext& ctx) {
    return run_guarded(ctx, "seg-eval", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        const ClassVocabulary vocab = load_vocabulary(manifest.class_vocabulary_path);
        const LabelMatcher matcher = make_matcher(c.config);

        std::vector<SegWorkItem> work;
        json skipped = json::array();
        for (const auto& method : c.config.methods) {
            for (const auto& scene : manifest.scenes) {
                for (const auto& seq : scene.sequences) {
                    fs::path pred;
                    if (!method.pred_cloud_pattern.empty()) {
                        pred = resolve_pattern(c.config, method.pred_cloud_pattern, method.name,
                                               scene.scene_id, condition_name(seq.condition));
                    } else if (seq.pred_cloud) {
                        pred = *seq.pred_cloud;
                    }
                    if (pred.empty() || !fs::exists(pred)) {
                        skipped.push_back({{"method", method.name},
                                           {"scene", scene.scene_id},
                                           {"condition", cond_str(seq.condition)},
                                           {"reason", "no prediction"}});
                        continue;
                    }
                    work.push_back(
                        {method.name, scene.scene_id, seq.condition, pred, seq.gt_cloud});
                }
            }
        }

        struct Outcome {
            bool ok = false;
            SegmentationResult result;
            std::string error;
        };
        std::vector<Outcome> outcomes(work.size());
        parallel_for(work.size(), c.workers(), [&](std::size_t i) {
            const SegWorkItem& item = work[i];
            try {
                PlyReadOptions gt_options;
                gt_options.label_field = c.config.seg.label_field;
                gt_options.class_count = vocab.size();
                const LabeledPointCloud gt = load_point_cloud(item.gt_path, gt_options);
                const LabeledPointCloud pred =
                    load_prediction(item.pred_path, c.config.seg, vocab, matcher);
                SegmentationResult result =
                    evaluate_segmentation(gt, pred, vocab.size(), c.config.seg.radius);
                result.scene_id = item.scene;
                result.condition = item.condition;
                outcomes[i] = {true, std::move(result), {}};
            } catch (const Error& e) {
                outcomes[i] = {false, {}, e.what()};
            }
        });

        json failures = json::array();
        // method -> condition -> per-scene metric values
        std::map<std::string, std::map<ConditionKind, std::vector<std::array<double, 2>>>>
            collected;
        for (std::size_t i = 0; i < work.size(); ++i) {
            const SegWorkItem& item = work[i];
            const Outcome& outcome = outcomes[i];
            if (!outcome.ok) {
                failures.push_back({{"method", item.method},
                                    {"scene", item.scene},
                                    {"condition", cond_str(item.condition)},
                                    {"error", outcome.error}});
                c.out() << "[seg-eval] " << item.method << "/" << item.scene << "/"
                        << condition_name(item.condition) << " failed: " << outcome.error << "\n";
                continue;
            }
            const SegmentationResult& r = outcome.result;
            json iou = json::array();
            for (const auto& v : r.per_class_iou) {
                iou.push_back(v ? json(*v) : json(nullptr));
            }
            const json doc{{"method", item.method},
                           {"scene_id", r.scene_id},
                           {"condition", cond_str(r.condition)},
                           {"macc", r.macc},
                           {"fmiou", r.fmiou},
                           {"per_class_iou", std::move(iou)},
                           {"class_point_counts", r.class_point_counts},
                           {"params", seg_params_json(c.config.seg)}};
            write_text_file_atomic(
                seg_result_path(c.config, item.method, item.scene, item.condition),
                canonical_dump(doc));
            collected[item.method][item.condition].push_back({r.macc, r.fmiou});
        }

        json methods_summary;
        for (const auto& [method, by_condition] : collected) {
            json conditions;
            std::vector<SegmentationResult> condition_means;
            for (const auto& [condition, values] : by_condition) {
                double macc_sum = 0.0, fmiou_sum = 0.0;
                for (const auto& v : values) {
                    macc_sum += v[0];
                    fmiou_sum += v[1];
                }
                SegmentationResult mean;
                mean.condition = condition;
                mean.macc = macc_sum / static_cast<double>(values.size());
                mean.fmiou = fmiou_sum / static_cast<double>(values.size());
                condition_means.push_back(mean);
                conditions[cond_str(condition)] = {{"macc", mean.macc},
                                                   {"fmiou", mean.fmiou},
                                                   {"scene_count", values.size()}};
            }
            const ConditionAggregate agg = aggregate_conditions(condition_means);
            methods_summary[method] = {
                {"conditions", std::move(conditions)},
                {"aggregate",
                 {{"macc", {{"min", agg.macc.min}, {"max", agg.macc.max}, {"avg", agg.macc.avg}}},
                  {"fmiou",
                   {{"min", agg.fmiou.min}, {"max", agg.fmiou.max}, {"avg", agg.fmiou.avg}}}}}};
        }
        const json summary{{"methods", std::move(methods_summary)},
                           {"skipped", std::move(skipped)},
                           {"failures", std::move(failures)},
                           {"params", seg_params_json(c.config.seg)}};
        write_text_file_atomic(c.config.output_dir / "seg" / "summary.json",
                               canonical_dump(summary));
        c.out() << "seg-eval: " << work.size() << " pairs evaluated\n";
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// qa-gen / qa-validate / qa-answer / qa-eval
// ---------------------------------------------------------------------------

namespace {

struct QaSequenceRef {
    std::string scene;
    const SequenceSpec* spec = nullptr;
};

std::vector<QaSequenceRef> sequences_with_keyframes(const DatasetManifest& manifest) {
    std::vector<QaSequenceRef> refs;
    for (const auto& scene : manifest.scenes) {
        for (const auto& seq : scene.sequences) {
            if (seq.keyframes_dir) refs.push_back({scene.scene_id, &seq});
        }
    }
    return refs;
}

/// Stage abort: persist whatever a sequence produced under ".partial".
void write_partial_qa(const fs::path& final_path, const vqa::QASet& partial) {
    fs::path partial_path = final_path;
    partial_path += ".partial";
    write_text_file(partial_path, vqa::qa_set_to_string(partial));
}

json unified_to_json(const vqa::UnifiedDescription& unified) {
    return json{{"text", unified.text},
                {"frame_ids", unified.frame_ids},
                {"object_names", unified.object_names}};
}

vqa::UnifiedDescription unified_from_file(const fs::path& path) {
    const json doc = parse_json_file(path);
    vqa::UnifiedDescription unified;
    unified.text = require_string(doc, "text", path.string());
    for (const json& f : require_field(doc, "frame_ids", path.string())) {
        unified.frame_ids.push_back(f.get<int>());
    }
    for (const json& o : require_field(doc, "object_names", path.string())) {
        unified.object_names.push_back(o.get<std::string>());
    }
    return unified;
}

}  // namespace

int cmd_qa_gen(const CommandContext& ctx) {
    return run_guarded(ctx, "qa-gen", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        const vqa::PromptLibrary prompts = make_prompts(c.config);
        auto gateway = make_gateway(c);
        const vqa::LlmSession session{gateway.get(), &prompts, call_options(c.config, false)};
        const int n_total = resolve_n_total(c.config.vqa, manifest);

        for (const auto& ref : sequences_with_keyframes(manifest)) {
            const fs::path out_path = qa_dir(c.config, ref.scene, ref.spec->condition) /
                                      "qa_set.json";
            vqa::QASet set;
            set.header.dataset = manifest.dataset_name;
            set.header.scene = ref.scene;
            set.header.condition = ref.spec->condition;
            set.header.quotas = c.config.vqa.quotas;
            set.header.seed = c.config.vqa.seed;
            set.header.prompt_template_hashes = prompts.template_hashes();
            set.header.model_id = c.config.gateway.model_id;
            try {
                const auto frames =
                    vqa::sample_keyframes(*ref.spec->keyframes_dir, c.config.vqa.sampling,
                                          ref.scene, ref.spec->condition);
                std::vector<vqa::SceneDescription> descriptions(frames.size());
                parallel_for(frames.size(), c.workers(), [&](std::size_t i) {
                    descriptions[i] = vqa::describe_frame(session, frames[i]);
                });
                const vqa::UnifiedDescription unified =
                    vqa::aggregate_descriptions(descriptions);
                write_text_file_atomic(
                    qa_dir(c.config, ref.scene, ref.spec->condition) / "unified.json",
                    canonical_dump(unified_to_json(unified)));
                vqa::GenerationResult generated = vqa::generate_questions(
                    session, unified, c.config.vqa.quotas, n_total, c.config.vqa.seed);
                set.items = std::move(generated.items);
                store_qa_set(set, out_path);
                for (std::size_t i = 0; i < vqa::kCategoryCount; ++i) {
                    if (generated.summary.produced[i] < generated.summary.requested[i]) {
                        c.out() << "[qa-gen] " << ref.scene << "/"
                                << condition_name(ref.spec->condition) << " shortfall in "
                                << vqa::category_name(vqa::kAllCategories[i]) << ": "
                                << generated.summary.produced[i] << "/"
                                << generated.summary.requested[i] << "\n";
                    }
                }
                c.out() << "[qa-gen] " << ref.scene << "/" << condition_name(ref.spec->condition)
                        << ": " << set.items.size() << " questions\n";
            } catch (const Error& e) {
                write_partial_qa(out_path, set);
                c.out() << "qa-gen aborted at " << ref.scene << "/"
                        << condition_name(ref.spec->condition) << ": " << e.what() << "\n";
                return kExitFailure;
            }
        }
        return kExitOk;
    });
}

int cmd_qa_validate(const CommandContext& ctx) {
    return run_guarded(ctx, "qa-validate", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        const vqa::PromptLibrary prompts = make_prompts(c.config);
        auto gateway = make_gateway(c);
        const vqa::LlmSession session{gateway.get(), &prompts, call_options(c.config, false)};

        for (const auto& ref : sequences_with_keyframes(manifest)) {
            const fs::path in_path = qa_dir(c.config, ref.scene, ref.spec->condition) /
                                     "qa_set.json";
            const fs::path out_path = qa_dir(c.config, ref.scene, ref.spec->condition) /
                                      "validated.json";
            if (!fs::exists(in_path)) {
                c.out() << "[qa-validate] no QA set at " << in_path.string() << ", skipping\n";
                continue;
            }
            vqa::QASet set = vqa::load_qa_set(in_path);
            try {
                const auto frames =
                    vqa::sample_keyframes(*ref.spec->keyframes_dir, c.config.vqa.sampling,
                                          ref.scene, ref.spec->condition);
                const vqa::UnifiedDescription unified = unified_from_file(
                    qa_dir(c.config, ref.scene, ref.spec->condition) / "unified.json");
                set.items = vqa::validate_questions(session, std::move(set.items), unified,
                                                    frames);
                vqa::BalanceSummary balance;
                set.items = vqa::balance_questions(std::move(set.items),
                                                   c.config.vqa.max_object_share, &balance);
                store_qa_set(set, out_path);
                int validated = 0;
                for (const auto& item : set.items) {
                    if (item.status == vqa::QAStatus::Validated) ++validated;
                }
                c.out() << "[qa-validate] " << ref.scene << "/"
                        << condition_name(ref.spec->condition) << ": " << validated << "/"
                        << set.items.size() << " validated\n";
            } catch (const Error& e) {
                write_partial_qa(out_path, set);
                c.out() << "qa-validate aborted at " << ref.scene << "/"
                        << condition_name(ref.spec->condition) << ": " << e.what() << "\n";
                return kExitFailure;
            }
        }
        return kExitOk;
    });
}

int cmd_qa_answer(const CommandContext& ctx) {
    return run_guarded(ctx, "qa-answer", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        const vqa::PromptLibrary prompts = make_prompts(c.config);
        auto gateway = make_gateway(c);
        const vqa::LlmSession session{gateway.get(), &prompts, call_options(c.config, false)};
        const auto hashes = prompts.template_hashes();

        for (const auto& method : c.config.methods) {
            for (const auto& ref : sequences_with_keyframes(manifest)) {
                const fs::path validated_path =
                    qa_dir(c.config, ref.scene, ref.spec->condition) / "validated.json";
                if (!fs::exists(validated_path)) continue;
                const vqa::QASet set = vqa::load_qa_set(validated_path);

                vqa::AnswerFile file;
                file.header.method = method.name;
                file.header.model_id = c.config.gateway.model_id;
                file.header.template_hash = hashes.at(vqa::kSceneGraphAnswerTemplate);
                file.header.temperature = c.config.gateway.temperature;

                const fs::path out_path =
                    answers_dir(c.config, method.name, ref.scene, ref.spec->condition) /
                    "answers.json";
                try {
                    if (!method.direct_answers_pattern.empty()) {
                        // SUT supplied its own answers; missing ids answer "".
                        const fs::path direct = resolve_pattern(
                            c.config, method.direct_answers_pattern, method.name, ref.scene,
                            condition_name(ref.spec->condition));
                        const json doc = parse_json_file(direct);
                        for (const auto& item : set.items) {
                            if (item.status != vqa::QAStatus::Validated) continue;
                            std::string answer;
                            if (doc.contains(item.qa_id)) {
                                answer = doc[item.qa_id].get<std::string>();
                            }
                            file.answers.push_back(
                                {item.qa_id, answer, vqa::AnswerSource::Direct});
                        }
                    } else {
                        fs::path graph_path;
                        if (!method.scene_graph_pattern.empty()) {
                            graph_path = resolve_pattern(c.config, method.scene_graph_pattern,
                                                         method.name, ref.scene,
                                                         condition_name(ref.spec->condition));
                        } else if (ref.spec->scene_graph) {
                            graph_path = *ref.spec->scene_graph;
                        }
                        if (graph_path.empty() || !fs::exists(graph_path)) {
                            c.out() << "[qa-answer] no scene graph for " << method.name << "/"
                                    << ref.scene << "/" << condition_name(ref.spec->condition)
                                    << ", skipping\n";
                            continue;
                        }
                        const SceneGraph graph = load_scene_graph(graph_path);
                        std::vector<const vqa::QAItem*> validated;
                        for (const auto& item : set.items) {
                            if (item.status == vqa::QAStatus::Validated) {
                                validated.push_back(&item);
                            }
                        }
                        std::vector<vqa::SystemAnswer> answers(validated.size());
                        parallel_for(validated.size(), c.workers(), [&](std::size_t i) {
                            answers[i] =
                                vqa::answer_from_scene_graph(session, graph, *validated[i]);
                        });
                        file.answers = std::move(answers);
                    }
                    store_answers(file, out_path);
                    c.out() << "[qa-answer] " << method.name << "/" << ref.scene << "/"
                            << condition_name(ref.spec->condition) << ": "
                            << file.answers.size() << " answers\n";
                } catch (const Error& e) {
                    fs::path partial_path = out_path;
                    partial_path += ".partial";
                    json partial = json::array();
                    for (const auto& a : file.answers) {
                        partial.push_back({{"qa_id", a.qa_id}, {"answer", a.answer}});
                    }
                    write_text_file(partial_path, canonical_dump(json{
                                                      {"error", e.what()},
                                                      {"answers", std::move(partial)}}));
                    c.out() << "qa-answer aborted at " << method.name << "/" << ref.scene
                            << ": " << e.what() << "\n";
                    return kExitFailure;
                }
            }
        }
        return kExitOk;
    });
}

int cmd_qa_eval(const CommandContext& ctx) {
    return run_guarded(ctx, "qa-eval", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        const vqa::PromptLibrary prompts = make_prompts(c.config);
        auto gateway = make_gateway(c);
        const vqa::LlmSession session{gateway.get(), &prompts, call_options(c.config, true)};
        const auto hashes = prompts.template_hashes();

        vqa::AccuracyOptions accuracy_options;
        accuracy_options.include_functional = c.config.vqa.include_functional;

        for (const auto& method : c.config.methods) {
            // (category, condition) -> summed counts across scenes
            std::map<std::pair<int, int>, vqa::AccuracyCell> merged;
            bool any = false;
            for (const auto& ref : sequences_with_keyframes(manifest)) {
                const fs::path validated_path =
                    qa_dir(c.config, ref.scene, ref.spec->condition) / "validated.json";
                const fs::path answer_path =
                    answers_dir(c.config, method.name, ref.scene, ref.spec->condition) /
                    "answers.json";
                if (!fs::exists(validated_path) || !fs::exists(answer_path)) continue;
                const vqa::QASet set = vqa::load_qa_set(validated_path);
                const vqa::AnswerFile answers = vqa::load_answers(answer_path);

                std::map<std::string, const vqa::QAItem*> items;
                for (const auto& item : set.items) items[item.qa_id] = &item;

                vqa::VerdictFile verdicts;
                verdicts.header.method = method.name;
                verdicts.header.judge_model_id = c.config.gateway.model_id;
                verdicts.header.template_hash = hashes.at(vqa::kSemanticJudgeTemplate);
                verdicts.header.temperature = c.config.gateway.judge_temperature;
                const fs::path verdict_path =
                    answers_dir(c.config, method.name, ref.scene, ref.spec->condition) /
                    "verdicts.json";
                try {
                    verdicts.verdicts.resize(answers.answers.size());
                    parallel_for(answers.answers.size(), c.workers(), [&](std::size_t i) {
                        const vqa::SystemAnswer& answer = answers.answers[i];
                        auto it = items.find(answer.qa_id);
                        if (it == items.end()) {
                            throw ContractViolation("answer references unknown qa_id '" +
                                                    answer.qa_id + "'");
                        }
                        verdicts.verdicts[i] = vqa::judge_answer(session, *it->second, answer);
                    });
                    store_verdicts(verdicts, verdict_path);
                } catch (const Error& e) {
                    fs::path partial_path = verdict_path;
                    partial_path += ".partial";
                    write_text_file(partial_path, canonical_dump(json{{"error", e.what()}}));
                    c.out() << "qa-eval aborted at " << method.name << "/" << ref.scene << ": "
                            << e.what() << "\n";
                    return kExitFailure;
                }

                const std::vector<vqa::QASet> sets{set};
                const vqa::AccuracyTable table =
                    vqa::compute_accuracy(verdicts.verdicts, sets, accuracy_options);
                for (const auto& cell : table.cells) {
                    const auto key = std::make_pair(static_cast<int>(cell.category),
                                                    static_cast<int>(cell.condition));
                    vqa::AccuracyCell& agg = merged[key];
                    agg.category = cell.category;
                    agg.condition = cell.condition;
                    agg.n_questions += cell.n_questions;
                    agg.n_correct += cell.n_correct;
                    any = true;
                }
            }
            if (!any) continue;
            json cells = json::array();
            for (auto& [key, cell] : merged) {
                cell.accuracy = static_cast<double>(cell.n_correct) / cell.n_questions;
                cells.push_back({{"category", vqa::category_name(cell.category)},
                                 {"condition", cond_str(cell.condition)},
                                 {"n_questions", cell.n_questions},
                                 {"n_correct", cell.n_correct},
                                 {"accuracy", cell.accuracy}});
            }
            const json doc{
                {"header",
                 {{"method", method.name},
                  {"judge_model_id", c.config.gateway.model_id},
                  {"judge_temperature", c.config.gateway.judge_temperature},
                  {"include_functional", accuracy_options.include_functional}}},
                {"cells", std::move(cells)}};
            write_text_file_atomic(c.config.output_dir / "accuracy" / (method.name + ".json"),
                                   canonical_dump(doc));
            c.out() << "[qa-eval] " << method.name << ": accuracy table written\n";
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

namespace {

struct SegCell {
    double macc = 0.0;
    double fmiou = 0.0;
    int scenes = 0;
};

std::optional<ConditionKind> pick_reference(const RunConfig& config,
                                            const std::set<ConditionKind>& present) {
    if (config.report.reference_condition != "auto") {
        const auto kind = condition_from_name(config.report.reference_condition);
        if (kind && present.count(*kind)) return kind;
        return std::nullopt;
    }
    if (present.count(ConditionKind::Baseline)) return ConditionKind::Baseline;
    if (present.count(ConditionKind::NominalLights)) return ConditionKind::NominalLights;
    return std::nullopt;
}

}  // namespace

int cmd_report(const CommandContext& ctx) {
    return run_guarded(ctx, "report", [](const CommandContext& c) {
        const fs::path seg_root = c.config.output_dir / "seg";
        // method -> condition -> accumulated means
        std::map<std::string, std::map<ConditionKind, SegCell>> table;
        std::set<ConditionKind> present;
        if (fs::is_directory(seg_root)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::recursive_directory_iterator(seg_root)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json" &&
                    entry.path().filename() != "summary.json") {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                const json doc = parse_json_file(file);
                const std::string method = require_string(doc, "method", file.string());
                const std::string cond = require_string(doc, "condition", file.string());
                const auto kind = condition_from_name(cond);
                if (!kind) throw SchemaError(file.string() + ": unknown condition " + cond);
                SegCell& cell = table[method][*kind];
                cell.macc += require_number(doc, "macc", file.string());
                cell.fmiou += require_number(doc, "fmiou", file.string());
                ++cell.scenes;
                present.insert(*kind);
            }
            for (auto& [method, row] : table) {
                for (auto& [kind, cell] : row) {
                    cell.macc /= cell.scenes;
                    cell.fmiou /= cell.scenes;
                }
            }
        }
        if (table.empty()) {
            c.out() << "report: no segmentation results under " << seg_root.string() << "\n";
        }

        std::vector<ConditionKind> columns;
        for (ConditionKind kind : kAllConditions) {
            if (present.count(kind)) columns.push_back(kind);
        }

        std::map<std::string, std::optional<double>> fps_by_method;
        for (const auto& method : c.config.methods) fps_by_method[method.name] = method.fps;

        std::string markdown = "# Evaluation report\n\n## Run parameters\n\n";
        markdown += "- model_id: " + c.config.gateway.model_id + "\n";
        markdown += "- temperature: " + format_fixed(c.config.gateway.temperature, 2) + "\n";
        markdown +=
            "- judge_temperature: " + format_fixed(c.config.gateway.judge_temperature, 2) + "\n";
        markdown += "- vqa seed: " + std::to_string(c.config.vqa.seed) + "\n";
        markdown += "- vqa n_total: ";
        markdown += c.config.vqa.n_total ? std::to_string(*c.config.vqa.n_total)
                                         : std::string("auto (184 with baseline, else 76)");
        markdown += "\n";
        markdown +=
            "- max_object_share: " + format_fixed(c.config.vqa.max_object_share, 2) + "\n";
        markdown += "- association radius (m): " + format_fixed(c.config.seg.radius, 3) + "\n";
        markdown += "- label matcher: " + c.config.seg.matcher + "\n";
        const auto template_hashes = make_prompts(c.config).template_hashes();
        markdown += "- prompt template hashes:\n";
        for (const auto& [id, hash] : template_hashes) {
            markdown += "  - " + id + ": " + hash + "\n";
        }
        markdown += "\n";

        // One table per metric: method, fps, per-condition mean, min/max/avg,
        // rank by avg (1 = best).
        for (int metric = 0; metric < 2; ++metric) {
            const std::string metric_name = metric == 0 ? "macc" : "fmiou";
            std::vector<std::vector<std::string>> rows;
            std::vector<std::string> header{"method", "fps"};
            for (ConditionKind kind : columns) header.emplace_back(condition_name(kind));
            header.insert(header.end(), {"min", "max", "avg", "rank_avg"});

            std::vector<std::pair<std::string, double>> avgs;
            for (const auto& [method, row] : table) {
                std::vector<double> values;
                for (ConditionKind kind : columns) {
                    auto it = row.find(kind);
                    if (it != row.end()) {
                        values.push_back(metric == 0 ? it->second.macc : it->second.fmiou);
                    }
                }
                if (!values.empty()) {
                    avgs.emplace_back(method, aggregate_metric(values).avg);
                }
            }
            std::sort(avgs.begin(), avgs.end(), [](const auto& a, const auto& b) {
                return a.second > b.second || (a.second == b.second && a.first < b.first);
            });
            std::map<std::string, int> rank;
            for (std::size_t i = 0; i < avgs.size(); ++i) rank[avgs[i].first] = static_cast<int>(i) + 1;

            for (const auto& [method, row] : table) {
                std::vector<std::string> cells{method};
                const auto fps = fps_by_method.count(method) ? fps_by_method[method]
                                                             : std::optional<double>{};
                cells.push_back(fps ? format_fixed(*fps, 2) : "");
                std::vector<double> values;
                for (ConditionKind kind : columns) {
                    auto it = row.find(kind);
                    if (it == row.end()) {
                        cells.emplace_back("");
                    } else {
                        const double v = metric == 0 ? it->second.macc : it->second.fmiou;
                        values.push_back(v);
                        cells.push_back(format_fixed(v, 3));
                    }
                }
                if (values.empty()) continue;
                const MetricAggregate agg = aggregate_metric(values);
                cells.push_back(format_fixed(agg.min, 3));
                cells.push_back(format_fixed(agg.max, 3));
                cells.push_back(format_fixed(agg.avg, 3));
                cells.push_back(std::to_string(rank[method]));
                rows.push_back(std::move(cells));
            }

            std::vector<std::vector<std::string>> csv_rows{header};
            csv_rows.insert(csv_rows.end(), rows.begin(), rows.end());
            write_text_file_atomic(
                c.config.output_dir / "report" / ("segmentation_" + metric_name + ".csv"),
                render_csv(csv_rows));
            markdown += "## Segmentation " + std::string(metric == 0 ? "mAcc" : "f-mIoU") +
                        " (mean over scenes)\n\n" + render_markdown_table(header, rows) + "\n";
        }

        // Degradation against the reference condition.
        const auto reference = pick_reference(c.config, present);
        if (!table.empty() && reference) {
            std::vector<std::string> header{"method", "metric", "condition", "degradation_pct"};
            std::vector<std::vector<std::string>> rows;
            for (const auto& [method, row] : table) {
                const auto ref_it = row.find(*reference);
                if (ref_it == row.end()) continue;
                for (int metric = 0; metric < 2; ++metric) {
                    const double ref_value =
                        metric == 0 ? ref_it->second.macc : ref_it->second.fmiou;
                    for (ConditionKind kind : columns) {
                        const auto it = row.find(kind);
                        if (it == row.end()) continue;
                        const double value = metric == 0 ? it->second.macc : it->second.fmiou;
                        rows.push_back({method, metric == 0 ? "macc" : "fmiou",
                                        cond_str(kind),
                                        format_fixed(compute_degradation(ref_value, value), 2)});
                    }
                }
            }
            std::vector<std::vector<std::string>> csv_rows{header};
            csv_rows.insert(csv_rows.end(), rows.begin(), rows.end());
            write_text_file_atomic(c.config.output_dir / "report" / "degradation.csv",
                                   render_csv(csv_rows));
            markdown += "## Degradation vs " + cond_str(*reference) + " (percent)\n\n" +
                        render_markdown_table(header, rows) + "\n";
        } else if (!table.empty()) {
            c.out() << "report: reference condition missing, degradation table omitted\n";
            markdown += "## Degradation\n\nReference condition missing; table omitted.\n\n";
        }

        // VQA accuracy tables collected by qa-eval.
        const fs::path accuracy_root = c.config.output_dir / "accuracy";
        if (fs::is_directory(accuracy_root)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(accuracy_root)) {
                if (entry.is_regular_file() && entry.path().extension() == ".json") {
                    files.push_back(entry.path());
                }
            }
            std::sort(files.begin(), files.end());
            std::vector<std::string> header{"method",      "category",  "condition",
                                            "n_questions", "n_correct", "accuracy"};
            std::vector<std::vector<std::string>> rows;
            for (const auto& file : files) {
                const json doc = parse_json_file(file);
                const std::string method =
                    require_string(doc["header"], "method", file.string());
                for (const json& cell : doc["cells"]) {
                    rows.push_back({method, cell["category"].get<std::string>(),
                                    cell["condition"].get<std::string>(),
                                    std::to_string(cell["n_questions"].get<int>()),
                                    std::to_string(cell["n_correct"].get<int>()),
                                    format_fixed(cell["accuracy"].get<double>(), 3)});
                }
            }
            if (!rows.empty()) {
                std::vector<std::vector<std::string>> csv_rows{header};
                csv_rows.insert(csv_rows.end(), rows.begin(), rows.end());
                write_text_file_atomic(c.config.output_dir / "report" / "vqa_accuracy.csv",
                                       render_csv(csv_rows));
                markdown += "## Answering accuracy\n\n" + render_markdown_table(header, rows) +
                            "\n";
            }
        }

        write_text_file_atomic(c.config.output_dir / "report" / "report.md", markdown);
        c.out() << "report: written to " << (c.config.output_dir / "report").string() << "\n";
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// scenario-emit
// ---------------------------------------------------------------------------

int cmd_scenario_emit(const CommandContext& ctx) {
    return run_guarded(ctx, "scenario-emit", [](const CommandContext& c) {
        const DatasetManifest manifest = load_manifest(c.config.manifest);
        for (const auto& scene : manifest.scenes) {
            for (ConditionKind kind : kAllConditions) {
                const ConditionConfig config = emit_condition_config(kind);
                const fs::path path = c.config.output_dir / "scenarios" / scene.scene_id /
                                      (cond_str(kind) + ".json");
                write_text_file_atomic(path, canonical_dump(condition_config_to_json(config)));
            }
        }
        c.out() << "scenario-emit: " << manifest.scenes.size() * kAllConditions.size()
                << " condition documents written\n";
        return kExitOk;
    });
}

}  // namespace osmeval::cli
