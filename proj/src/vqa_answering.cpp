#include "osmeval/vqa/answering.hpp"

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"

namespace osmeval::vqa {

using nlohmann::json;

SystemAnswer answer_from_scene_graph(const LlmSession& session, const SceneGraph& graph,
                                     const QAItem& item) {
    llm::ChatRequest request = session.make_request(
        kSceneGraphAnswerTemplate,
        {{"graph", serialize_scene_graph(graph)}, {"question", item.question}});
    try {
        const llm::ChatResponse response = session.gateway->complete(request);
        return {item.qa_id, response.text, AnswerSource::SceneGraphLLM};
    } catch (const llm::GatewayError& e) {
        throw llm::GatewayError("answering " + item.qa_id + ": " + e.what());
    }
}

namespace {

std::string source_name(AnswerSource source) {
    return source == AnswerSource::Direct ? "direct" : "scene_graph_llm";
}

AnswerSource source_from_name(const std::string& name, const std::string& context) {
    if (name == "direct") return AnswerSource::Direct;
    if (name == "scene_graph_llm") return AnswerSource::SceneGraphLLM;
    throw SchemaError(context + ": unknown answer source '" + name + "'");
}

}  // namespace

void store_answers(const AnswerFile& file, const std::filesystem::path& path) {
    json answers = json::array();
    for (const auto& answer : file.answers) {
        answers.push_back({{"qa_id", answer.qa_id},
                           {"answer", answer.answer},
                           {"answered_by", source_name(answer.answered_by)}});
    }
    const json doc{{"header",
                    {{"method", file.header.method},
                     {"model_id", file.header.model_id},
                     {"template_hash", file.header.template_hash},
                     {"temperature", file.header.temperature}}},
                   {"answers", std::move(answers)}};
    write_text_file_atomic(path, canonical_dump(doc));
}

AnswerFile load_answers(const std::filesystem::path& path) {
    const json doc = parse_json_file(path);
    const std::string context = path.string();
    expect_object(doc, {"header", "answers"}, context);
    const json& header = require_field(doc, "header", context);

    AnswerFile file;
    file.header.method = require_string(header, "method", context);
    file.header.model_id = require_string(header, "model_id", context);
    file.header.template_hash = require_string(header, "template_hash", context);
    file.header.temperature = require_number(header, "temperature", context);
    for (const json& record : require_field(doc, "answers", context)) {
        expect_object(record, {"qa_id", "answer", "answered_by"}, context);
        SystemAnswer answer;
        answer.qa_id = require_string(record, "qa_id", context);
        answer.answer = require_string(record, "answer", context);
        answer.answered_by =
            source_from_name(require_string(record, "answered_by", context), context);
        file.answers.push_back(std::move(answer));
    }
    return file;
}

}  // namespace osmeval::vqa
