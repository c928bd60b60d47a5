#include "osmeval/vqa/accuracy.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "osmeval/errors.hpp"

namespace osmeval::vqa {

AccuracyTable compute_accuracy(std::span<const Verdict> verdicts, std::span<const QASet> sets,
                               const AccuracyOptions& options) {
    struct ItemInfo {
        QACategory category;
        ConditionKind condition;
    };
    std::unordered_map<std::string, ItemInfo> index;
    for (const auto& set : sets) {
        for (const auto& item : set.items) {
            index.emplace(item.qa_id, ItemInfo{item.category, set.header.condition});
        }
    }

    std::map<std::pair<int, int>, AccuracyCell> groups;
    for (const auto& verdict : verdicts) {
        const auto it = index.find(verdict.qa_id);
        if (it == index.end()) {
            throw ContractViolation("verdict references unknown qa_id '" + verdict.qa_id + "'");
        }
        const ItemInfo& info = it->second;
        if (info.category == QACategory::RelationsFunctional && !options.include_functional) {
            continue;
        }
        if (verdict.judge_failed && options.exclude_judge_failures) continue;

        const auto key = std::make_pair(static_cast<int>(info.category),
                                        static_cast<int>(info.condition));
        AccuracyCell& cell = groups[key];
        cell.category = info.category;
        cell.condition = info.condition;
        ++cell.n_questions;
        if (verdict.correct) ++cell.n_correct;
    }

    AccuracyTable table;
    table.cells.reserve(groups.size());
    for (auto& [key, cell] : groups) {
        cell.accuracy = static_cast<double>(cell.n_correct) / cell.n_questions;
        table.cells.push_back(cell);
    }
    return table;
}

}  // namespace osmeval::vqa
