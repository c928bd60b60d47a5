#include "osmeval/vqa/judging.hpp"

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/text.hpp"

namespace osmeval::vqa {

using nlohmann::json;

namespace {

llm::JsonSchema verdict_schema() {
    llm::JsonSchema schema;
    schema.id = "judge_verdict.v1";
    llm::FieldSpec correct{"correct", llm::FieldKind::Boolean};
    llm::FieldSpec rationale{"rationale", llm::FieldKind::String};
    rationale.required = false;
    schema.fields = {correct, rationale};
    return schema;
}

}  // namespace

Verdict judge_exact(const QAItem& item, const SystemAnswer& answer) {
    if (!uses_exact_judging(item.category)) {
        throw ContractViolation("judge_exact only handles binary and measurement categories");
    }
    Verdict verdict;
    verdict.qa_id = item.qa_id;
    verdict.method = JudgeMethod::Exact;

    if (is_binary(item.category)) {
        const auto predicted = extract_yes_no(answer.answer);
        const auto expected = extract_yes_no(item.gt_answer);
        verdict.correct = predicted && expected && *predicted == *expected;
    } else {
        const auto predicted = extract_number(answer.answer);
        const auto expected = extract_number(item.gt_answer);
        verdict.correct = predicted && expected && *predicted == *expected;
    }
    return verdict;
}

Verdict judge_semantic(const LlmSession& session, const QAItem& item,
                       const SystemAnswer& answer) {
    if (uses_exact_judging(item.category)) {
        throw ContractViolation("judge_semantic only handles attribute/relation categories");
    }
    Verdict verdict;
    verdict.qa_id = item.qa_id;
    verdict.method = JudgeMethod::LLMJudge;
    try {
        const json doc = session.gateway->complete_structured(session.make_request(
            kSemanticJudgeTemplate,
            {{"question", item.question},
             {"gt_answer", item.gt_answer},
             {"answer", answer.answer}},
            {}, verdict_schema()));
        verdict.correct = doc["correct"].get<bool>();
        if (doc.contains("rationale")) verdict.rationale = doc["rationale"].get<std::string>();
    } catch (const llm::StructuredOutputError& e) {
        verdict.correct = false;
        verdict.judge_failed = true;
        verdict.rationale = std::string("judging-failure: ") + e.what();
    }
    return verdict;
}

Verdict judge_answer(const LlmSession& session, const QAItem& item, const SystemAnswer& answer) {
    return uses_exact_judging(item.category) ? judge_exact(item, answer)
                                             : judge_semantic(session, item, answer);
}

namespace {

std::string method_name(JudgeMethod method) {
    return method == JudgeMethod::Exact ? "exact" : "llm_judge";
}

JudgeMethod method_from_name(const std::string& name, const std::string& context) {
    if (name == "exact") return JudgeMethod::Exact;
    if (name == "llm_judge") return JudgeMethod::LLMJudge;
    throw SchemaError(context + ": unknown judge method '" + name + "'");
}

}  // namespace

void store_verdicts(const VerdictFile& file, const std::filesystem::path& path) {
    json verdicts = json::array();
    for (const auto& verdict : file.verdicts) {
        json record{{"qa_id", verdict.qa_id},
                    {"correct", verdict.correct},
                    {"method", method_name(verdict.method)}};
        if (verdict.method == JudgeMethod::LLMJudge) record["rationale"] = verdict.rationale;
        if (verdict.judge_failed) record["judge_failed"] = true;
        verdicts.push_back(std::move(record));
    }
    const json doc{{"header",
                    {{"method", file.header.method},
                     {"judge_model_id", file.header.judge_model_id},
                     {"template_hash", file.header.template_hash},
                     {"temperature", file.header.temperature}}},
                   {"verdicts", std::move(verdicts)}};
    write_text_file_atomic(path, canonical_dump(doc));
}

VerdictFile load_verdicts(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    const std::string context = path.string();
    expect_object(doc, {"header", "verdicts"}, context);
    const json& header = require_field(doc, "header", context);

    VerdictFile file;
    file.header.method = require_string(header, "method", context);
    file.header.judge_model_id = require_string(header, "judge_model_id", context);
    file.header.template_hash = require_string(header, "template_hash", context);
    file.header.temperature = require_number(header, "temperature", context);
    for (const json& record : require_field(doc, "verdicts", context)) {
        expect_object(record, {"qa_id", "correct", "method", "rationale", "judge_failed"},
                      context);
        Verdict verdict;
        verdict.qa_id = require_string(record, "qa_id", context);
        verdict.correct = require_field(record, "correct", context).get<bool>();
        verdict.method = method_from_name(require_string(record, "method", context), context);
        if (record.contains("rationale")) {
            verdict.rationale = record["rationale"].get<std::string>();
        }
        if (record.contains("judge_failed")) {
            verdict.judge_failed = record["judge_failed"].get<bool>();
        }
        if (verdict.method == JudgeMethod::Exact && !verdict.rationale.empty()) {
            throw SchemaError(context + ": exact verdict '" + verdict.qa_id +
                              "' must not carry a rationale");
        }
        file.verdicts.push_back(std::move(verdict));
    }
    return file;
}

}  // namespace osmeval::vqa
