#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "osmeval/condition.hpp"
#include "osmeval/vqa/question.hpp"

namespace osmeval::vqa {

struct QASetHeader {
    std::string dataset;
    std::string scene;
    ConditionKind condition = ConditionKind::Baseline;
    CategoryQuota quotas = CategoryQuota::defaults();
    std::uint64_t seed = 0;
    std::map<std::string, std::string> prompt_template_hashes;
    std::string model_id;
};

/// One stored question set: provenance header plus every item, including
/// rejected ones with their reasons.
struct QASet {
    QASetHeader header;
    std::vector<QAItem> items;
};

std::string qa_set_to_string(const QASet& set);
QASet qa_set_from_string(const std::string& text, const std::string& context);

void store_qa_set(const QASet& set, const std::filesystem::path& path);
QASet load_qa_set(const std::filesystem::path& path);

}  // namespace osmeval::vqa
