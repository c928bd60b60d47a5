#include "osmeval/vqa/question.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "osmeval/errors.hpp"
#include "osmeval/label_match.hpp"
#include "osmeval/text.hpp"

namespace osmeval::vqa {

using nlohmann::json;

std::string_view category_name(QACategory category) {
    switch (category) {
        case QACategory::BinaryGeneral: return "binary_general";
        case QACategory::BinaryExistence: return "binary_existence";
        case QACategory::BinaryLogical: return "binary_logical";
        case QACategory::Measurement: return "measurement";
        case QACategory::ObjectAttributes: return "object_attributes";
        case QACategory::RelationsFunctional: return "relations_functional";
        case QACategory::RelationsSpatial: return "relations_spatial";
        case QACategory::Comparison: return "comparison";
    }
    return "binary_general";
}

std::optional<QACategory> category_from_name(std::string_view name) {
    for (QACategory category : kAllCategories) {
        if (category_name(category) == name) return category;
    }
    return std::nullopt;
}

bool is_binary(QACategory category) {
    return category == QACategory::BinaryGeneral || category == QACategory::BinaryExistence ||
           category == QACategory::BinaryLogical;
}

bool uses_exact_judging(QACategory category) {
    return is_binary(category) || category == QACategory::Measurement;
}

CategoryQuota CategoryQuota::defaults() {
    CategoryQuota quota;
    quota.ratios = {0.186, 0.166, 0.184, 0.052, 0.170, 0.008, 0.187, 0.047};
    return quota;
}

void CategoryQuota::validate() const {
    double sum = 0.0;
    for (double r : ratios) {
        if (r < 0.0) throw ContractViolation("category quota ratios must be non-negative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ContractViolation("category quota ratios must sum to 1");
    }
}

std::array<int, kCategoryCount> largest_remainder_counts(const CategoryQuota& quotas,
                                                         int n_total) {
    if (n_total < 0) throw ContractViolation("n_total must be non-negative");
    quotas.validate();

    std::array<int, kCategoryCount> counts{};
    std::array<double, kCategoryCount> remainders{};
    int assigned = 0;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        const double share = quotas.ratios[i] * n_total;
        counts[i] = static_cast<int>(std::floor(share));
        remainders[i] = share - counts[i];
        assigned += counts[i];
    }
    std::array<std::size_t, kCategoryCount> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&remainders](std::size_t a, std::size_t b) {
        return remainders[a] > remainders[b];
    });
    for (std::size_t i = 0; assigned < n_total; ++i) {
        ++counts[order[i % kCategoryCount]];
        ++assigned;
    }
    return counts;
}

namespace {

std::string category_guidance(QACategory category) {
    switch (category) {
        case QACategory::BinaryGeneral:
            return "Write Yes/No questions about the presence of objects and general scene "
                   "characteristics. The ground-truth answer must be \"yes\" or \"no\".";
        case QACategory::BinaryExistence:
            return "Write Yes/No questions that probe for false positives by asking about "
                   "plausible household objects that are absent from the description. The "
                   "ground-truth answer must be \"no\".";
        case QACategory::BinaryLogical:
            return "Write Yes/No questions that combine two facts with AND or OR. The "
                   "ground-truth answer must be \"yes\" or \"no\".";
        case QACategory::Measurement:
            return "Write counting questions about object counts or scene attributes. The "
                   "ground-truth answer must be a single non-negative number.";
        case QACategory::ObjectAttributes:
            return "Write questions about object properties such as color, shape, or material.";
        case QACategory::RelationsFunctional:
            return "Write questions about functional relationships between objects (what "
                   "supports, holds, or is used together with what).";
        case QACategory::RelationsSpatial:
            return "Write questions about the spatial placement of objects relative to each "
                   "other.";
        case QACategory::Comparison:
            return "Write questions comparing properties of two objects, such as size, color, "
                   "or position.";
    }
    return "";
}

llm::JsonSchema question_list_schema() {
    llm::JsonSchema schema;
    schema.id = "question_list.v1";
    llm::FieldSpec questions{"questions", llm::FieldKind::ObjectArray};
    llm::FieldSpec question{"question", llm::FieldKind::String};
    question.non_empty = true;
    llm::FieldSpec answer{"answer", llm::FieldKind::String};
    llm::FieldSpec objects{"objects", llm::FieldKind::StringArray};
    objects.required = false;
    questions.item_fields = {question, answer, objects};
    schema.fields = {questions};
    return schema;
}

llm::JsonSchema duplicate_schema() {
    llm::JsonSchema schema;
    schema.id = "duplicate_check.v1";
    schema.fields = {{"duplicate", llm::FieldKind::Boolean}};
    return schema;
}

llm::JsonSchema validation_schema() {
    llm::JsonSchema schema;
    schema.id = "question_validation.v1";
    llm::FieldSpec valid{"valid", llm::FieldKind::Boolean};
    llm::FieldSpec reason{"reason", llm::FieldKind::String};
    reason.required = false;
    schema.fields = {valid, reason};
    return schema;
}

/// Canonical ground-truth answer for an item, or nullopt when the model's
/// answer cannot satisfy the category's answer invariant.
std::optional<std::string> canonical_gt_answer(QACategory category, const std::string& raw) {
    if (is_binary(category)) {
        const auto yes_no = extract_yes_no(raw);
        if (!yes_no) return std::nullopt;
        return std::string(*yes_no ? "yes" : "no");
    }
    if (category == QACategory::Measurement) {
        const auto value = extract_number(raw);
        if (!value || *value < 0) return std::nullopt;
        return std::to_string(*value);
    }
    const std::string trimmed = collapse_whitespace(raw);
    if (trimmed.empty()) return std::nullopt;
    return trimmed;
}

}  // namespace

GenerationResult generate_questions(const LlmSession& session,
                                    const UnifiedDescription& unified,
                                    const CategoryQuota& quotas, int n_total,
                                    std::uint64_t seed) {
    const auto counts = largest_remainder_counts(quotas, n_total);

    GenerationResult result;
    result.summary.requested = counts;
    if (n_total == 0) return result;

    int next_id = 0;
    for (std::size_t ci = 0; ci < kCategoryCount; ++ci) {
        const QACategory category = kAllCategories[ci];
        const int want = counts[ci];
        if (want == 0) continue;

        const std::map<std::string, std::string> vars = {
            {"category", std::string(category_name(category))},
            {"category_guidance", category_guidance(category)},
            {"count", std::to_string(want)},
            {"seed", std::to_string(seed)},
            {"description", unified.text},
        };
        const json doc = session.gateway->complete_structured(
            session.make_request(kQuestionGenerationTemplate, vars, {}, question_list_schema()));

        int produced = 0;
        for (const json& q : doc["questions"]) {
            if (produced >= want) break;
            const auto gt = canonical_gt_answer(category, q["answer"].get<std::string>());
            if (!gt) continue;  // violates the category's answer invariant
            QAItem item;
            char buf[16];
            std::snprintf(buf, sizeof buf, "qa-%04d", next_id++);
            item.qa_id = buf;
            item.category = category;
            item.question = collapse_whitespace(q["question"].get<std::string>());
            item.gt_answer = *gt;
            item.source_frames = unified.frame_ids;
            if (q.contains("objects")) {
                for (const json& obj : q["objects"]) {
                    const std::string name = normalize_label(obj.get<std::string>());
                    if (!name.empty() &&
                        std::find(item.referenced_objects.begin(), item.referenced_objects.end(),
                                  name) == item.referenced_objects.end()) {
                        item.referenced_objects.push_back(name);
                    }
                }
            }
            item.status = QAStatus::Generated;
            result.items.push_back(std::move(item));
            ++produced;
        }
        result.summary.produced[ci] = produced;
    }
    return result;
}

std::vector<QAItem> validate_questions(const LlmSession& session, std::vector<QAItem> items,
                                       const UnifiedDescription& unified,
                                       std::span<const FrameSample> frames) {
    // Stage 1: exact duplicates on normalized question text (first one
    // survives; order by qa_id).
    std::sort(items.begin(), items.end(),
              [](const QAItem& a, const QAItem& b) { return a.qa_id < b.qa_id; });
    std::set<std::string> seen;
    for (auto& item : items) {
        if (item.status == QAStatus::Rejected) continue;
        if (!seen.insert(normalize_question_text(item.question)).second) {
            item.status = QAStatus::Rejected;
            item.rejection_reason = "duplicate";
        }
    }

    // Stage 2: LLM semantic-duplicate pass over remaining pairs within the
    // same category, in deterministic qa_id order.
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].status == QAStatus::Rejected) continue;
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (items[j].status == QAStatus::Rejected) continue;
            if (items[j].category != items[i].category) continue;
            const json verdict = session.gateway->complete_structured(session.make_request(
                kDuplicateCheckTemplate,
                {{"question_a", items[i].question}, {"question_b", items[j].question}}, {},
                duplicate_schema()));
            if (verdict["duplicate"].get<bool>()) {
                items[j].status = QAStatus::Rejected;
                items[j].rejection_reason = "semantic_duplicate";
            }
        }
    }

    // Stage 3: per-item consistency check against the unified description
    // and one source frame.
    std::map<int, const FrameSample*> frame_index;
    for (const auto& frame : frames) frame_index[frame.frame_id] = &frame;
    for (auto& item : items) {
        if (item.status == QAStatus::Rejected) continue;
        std::vector<std::filesystem::path> images;
        for (int fid : item.source_frames) {
            auto it = frame_index.find(fid);
            if (it != frame_index.end()) {
                images.push_back(it->second->image_path);
                break;  // one representative frame
            }
        }
        const json verdict = session.gateway->complete_structured(session.make_request(
            kQuestionValidationTemplate,
            {{"question", item.question},
             {"gt_answer", item.gt_answer},
             {"description", unified.text}},
            std::move(images), validation_schema()));
        if (verdict["valid"].get<bool>()) {
            item.status = QAStatus::Validated;
        } else {
            item.status = QAStatus::Rejected;
            item.rejection_reason =
                verdict.contains("reason") && !verdict["reason"].get<std::string>().empty()
                    ? verdict["reason"].get<std::string>()
                    : "invalid";
        }
    }
    return items;
}

std::vector<QAItem> balance_questions(std::vector<QAItem> items, double max_object_share,
                                      BalanceSummary* summary) {
    if (!(max_object_share > 0.0) || max_object_share > 1.0) {
        throw ContractViolation("max_object_share must be in (0, 1]");
    }

    std::map<std::string, int> removed;
    while (true) {
        // Count surviving items per referenced object.
        std::map<std::string, int> object_counts;
        int total = 0;
        for (const auto& item : items) {
            if (item.status != QAStatus::Validated) continue;
            ++total;
            for (const auto& obj : item.referenced_objects) ++object_counts[obj];
        }
        if (total == 0) break;

        // Offender: n_o exceeds cap*total by more than the one-item slack
        // integer rounding always permits. Worst share first; ties break to
        // the lexicographically smallest name (map order).
        const std::string* worst = nullptr;
        int worst_count = 0;
        for (const auto& [name, count] : object_counts) {
            if (static_cast<double>(count) > max_object_share * total + 1.0 + 1e-9 &&
                count > worst_count) {
                worst = &name;
                worst_count = count;
            }
        }
        if (!worst) break;

        // Remove that object's item with the highest qa_id.
        QAItem* victim = nullptr;
        for (auto& item : items) {
            if (item.status != QAStatus::Validated) continue;
            if (std::find(item.referenced_objects.begin(), item.referenced_objects.end(),
                          *worst) == item.referenced_objects.end()) {
                continue;
            }
            if (!victim || item.qa_id > victim->qa_id) victim = &item;
        }
        if (!victim) break;
        victim->status = QAStatus::Rejected;
        victim->rejection_reason = "object_balance:" + *worst;
        ++removed[*worst];
    }

    if (summary) {
        summary->removed_per_object.assign(removed.begin(), removed.end());
        summary->category_counts = {};
        for (const auto& item : items) {
            if (item.status == QAStatus::Validated) {
                ++summary->category_counts[static_cast<std::size_t>(item.category)];
            }
        }
    }
    return items;
}

}  // namespace osmeval::vqa
