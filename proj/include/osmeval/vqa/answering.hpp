#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "osmeval/scene_graph.hpp"
#include "osmeval/vqa/qa_store.hpp"
#include "osmeval/vqa/session.hpp"

namespace osmeval::vqa {

enum class AnswerSource { Direct, SceneGraphLLM };

struct SystemAnswer {
    std::string qa_id;
    std::string answer;
    AnswerSource answered_by = AnswerSource::SceneGraphLLM;
};

/// Ask the LLM to answer one question grounded only in the serialized scene
/// graph of the system under test. The reply is kept verbatim.
SystemAnswer answer_from_scene_graph(const LlmSession& session, const SceneGraph& graph,
                                     const QAItem& item);

struct AnswerFileHeader {
    std::string method;
    std::string model_id;
    std::string template_hash;  // answering template
    double temperature = 0.0;
};

struct AnswerFile {
    AnswerFileHeader header;
    std::vector<SystemAnswer> answers;
};

void store_answers(const AnswerFile& file, const std::filesystem::path& path);
AnswerFile load_answers(const std::filesystem::path& path);

}  // namespace osmeval::vqa
