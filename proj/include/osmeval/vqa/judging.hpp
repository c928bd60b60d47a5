#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "osmeval/vqa/answering.hpp"
#include "osmeval/vqa/question.hpp"
#include "osmeval/vqa/session.hpp"

namespace osmeval::vqa {

enum class JudgeMethod { Exact, LLMJudge };

struct Verdict {
    std::string qa_id;
    bool correct = false;
    JudgeMethod method = JudgeMethod::Exact;
    std::string rationale;  // LLMJudge only
    /// The LLM judge failed to produce a valid structured verdict; counted
    /// incorrect by default (see AccuracyOptions::exclude_judge_failures).
    bool judge_failed = false;
};

/// Direct comparison for binary and measurement questions. Binary answers
/// are normalized (lowercase, punctuation stripped) and the leading yes/no
/// token is extracted; measurement answers are parsed as digit strings or
/// English number words zero..twenty and compared exactly. An unparseable
/// answer is an incorrect verdict, not an error.
Verdict judge_exact(const QAItem& item, const SystemAnswer& answer);

/// LLM judgment for attribute / relation / comparison questions, via a
/// structured verdict at the session's (zero) temperature.
Verdict judge_semantic(const LlmSession& session, const QAItem& item,
                       const SystemAnswer& answer);

/// Dispatch on the item's category.
Verdict judge_answer(const LlmSession& session, const QAItem& item, const SystemAnswer& answer);

struct VerdictFileHeader {
    std::string method;
    std::string judge_model_id;
    std::string template_hash;  // judging template
    double temperature = 0.0;
};

struct VerdictFile {
    VerdictFileHeader header;
    std::vector<Verdict> verdicts;
};

void store_verdicts(const VerdictFile& file, const std::filesystem::path& path);
VerdictFile load_verdicts(const std::filesystem::path& path);

}  // namespace osmeval::vqa
