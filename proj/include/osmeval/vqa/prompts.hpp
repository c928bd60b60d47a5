#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace osmeval::vqa {

struct PromptTemplate {
    std::string id;
    std::string system_text;
    std::string user_text;  // may contain {placeholders}
};

/// The prompt set used by every pipeline stage. Built-in templates can be
/// overridden per id from a directory of `<id>.system.txt` / `<id>.user.txt`
/// files. Template hashes identify the exact text a run used and are
/// recorded in QA set and verdict file headers.
class PromptLibrary {
public:
    static PromptLibrary builtin();
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    const PromptTemplate& get(const std::string& id) const;
    std::map<std::string, std::string> template_hashes() const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// Replace every "{key}" with vars.at(key); unknown placeholders are left
/// untouched so template text may contain literal braces.
std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars);

inline constexpr const char* kSceneDescriptionTemplate = "scene_description";
inline constexpr const char* kQuestionGenerationTemplate = "question_generation";
inline constexpr const char* kDuplicateCheckTemplate = "duplicate_check";
inline constexpr const char* kQuestionValidationTemplate = "question_validation";
inline constexpr const char* kSceneGraphAnswerTemplate = "scene_graph_answer";
inline constexpr const char* kSemanticJudgeTemplate = "semantic_judge";

}  // namespace osmeval::vqa
