#include "osmeval/vqa/prompts.hpp"

#include "osmeval/digest.hpp"
#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"

namespace osmeval::vqa {

namespace {

PromptTemplate make(const char* id, const char* system_text, const char* user_text) {
    return {id, system_text, user_text};
}

// Each system prompt opens with a stable "TASK:" line; that line is part of
// the template contract (routing, debugging, scripted test backends).
const PromptTemplate kBuiltins[] = {
    make(kSceneDescriptionTemplate,
         R"(TASK: scene_description
You are a meticulous robotic-perception annotator. Describe exactly what is visible in the provided frame. Capture every distinct object with its attributes (color, material, shape where visible) and its spatial relations to other visible objects. Never mention objects that are not visible in the frame.
Reply with only a JSON document of the form {"narrative": <string>, "objects": [{"name": <string>, "attributes": <object>, "relations": [{"relation": <string>, "other": <string>}]}]}.)",
         R"(FRAME: {frame_id}
SEQUENCE: {scene_id}/{condition}
Describe this frame.)"),
    make(kQuestionGenerationTemplate,
         R"(TASK: question_generation
You write evaluation questions about an indoor scene strictly from the scene description you are given. Do not use any knowledge beyond the description; every ground-truth answer must be derivable from it alone.
{category_guidance}
Reply with only a JSON document of the form {"questions": [{"question": <string>, "answer": <string>, "objects": [<string>]}]}.)",
         R"(CATEGORY: {category}
COUNT: {count}
SEED: {seed}
SCENE DESCRIPTION:
{description}

Write exactly {count} questions of category "{category}" with ground-truth answers. List in "objects" the names of the objects each question refers to.)"),
    make(kDuplicateCheckTemplate,
         R"(TASK: duplicate_check
You judge whether two evaluation questions about the same scene ask for the same fact. Paraphrases count as duplicates; questions about different objects or different properties do not.
Reply with only a JSON document of the form {"duplicate": <boolean>}.)",
         R"(QUESTION A: {question_a}
QUESTION B: {question_b}
Are these two questions semantic duplicates?)"),
    make(kQuestionValidationTemplate,
         R"(TASK: question_validation
You check scene evaluation questions. A question is invalid when it is ambiguous, unanswerable from the scene description, logically inconsistent, or when its ground-truth answer contradicts the description or the attached frame.
Reply with only a JSON document of the form {"valid": <boolean>, "reason": <string>}.)",
         R"(QUESTION: {question}
GROUND TRUTH: {gt_answer}
SCENE DESCRIPTION:
{description}

One source frame is attached. Is this question valid?)"),
    make(kSceneGraphAnswerTemplate,
         R"(TASK: scene_graph_answer
You answer questions about a scene using only the scene graph provided. Answer concisely: "yes" or "no" for binary questions, a single number for counting questions, a short phrase otherwise. If the graph does not contain the information, answer "unknown".)",
         R"(SCENE GRAPH:
{graph}
QUESTION: {question})"),
    make(kSemanticJudgeTemplate,
         R"(TASK: semantic_judge
You decide whether a predicted answer agrees in meaning with the ground-truth answer to a question about a scene. Minor wording differences do not matter; factual disagreement does.
Reply with only a JSON document of the form {"correct": <boolean>, "rationale": <string>}.)",
         R"(QUESTION: {question}
GROUND TRUTH: {gt_answer}
PREDICTED: {answer})"),
};

}  // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    for (const auto& tmpl : kBuiltins) lib.templates_[tmpl.id] = tmpl;
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    PromptLibrary lib = builtin();
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("prompt override directory not found: " + dir.string());
    }
    for (auto& [id, tmpl] : lib.templates_) {
        const auto system_path = dir / (id + ".system.txt");
        const auto user_path = dir / (id + ".user.txt");
        if (std::filesystem::exists(system_path)) tmpl.system_text = read_text_file(system_path);
        if (std::filesystem::exists(user_path)) tmpl.user_text = read_text_file(user_path);
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw ContractViolation("unknown prompt template '" + id + "'");
    return it->second;
}

std::map<std::string, std::string> PromptLibrary::template_hashes() const {
    std::map<std::string, std::string> hashes;
    for (const auto& [id, tmpl] : templates_) {
        hashes[id] = sha256_hex(tmpl.system_text + "\n--\n" + tmpl.user_text);
    }
    return hashes;
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            const std::size_t end = text.find('}', i + 1);
            if (end != std::string::npos) {
                const std::string key = text.substr(i + 1, end - i - 1);
                auto it = vars.find(key);
                if (it != vars.end()) {
                    out += it->second;
                    i = end + 1;
                    continue;
                }
            }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

}  // namespace osmeval::vqa
