#pragma once

#include <span>
#include <vector>

#include "osmeval/vqa/judging.hpp"
#include "osmeval/vqa/qa_store.hpp"

namespace osmeval::vqa {

struct AccuracyCell {
    QACategory category = QACategory::BinaryGeneral;
    ConditionKind condition = ConditionKind::Baseline;
    int n_questions = 0;
    int n_correct = 0;
    double accuracy = 0.0;
};

/// Per (category, condition) correctness counts; groups without questions
/// are omitted. Cells are sorted by (category, condition) enum order.
struct AccuracyTable {
    std::vector<AccuracyCell> cells;
};

struct AccuracyOptions {
    /// Functional-relation questions are generated but excluded from
    /// accuracy by default; their validated populations are too small for
    /// reliable comparison.
    bool include_functional = false;
    /// Drop judge failures from the denominator instead of counting them
    /// incorrect.
    bool exclude_judge_failures = false;
};

/// Fold verdicts into the accuracy table. Each verdict's qa_id must resolve
/// against one of the given QA sets (which carry category and condition);
/// an unknown qa_id raises ContractViolation.
AccuracyTable compute_accuracy(std::span<const Verdict> verdicts, std::span<const QASet> sets,
                               const AccuracyOptions& options = {});

}  // namespace osmeval::vqa
