#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osmeval/vqa/description.hpp"
#include "osmeval/vqa/frames.hpp"
#include "osmeval/vqa/session.hpp"

namespace osmeval::vqa {

enum class QACategory {
    BinaryGeneral,
    BinaryExistence,
    BinaryLogical,
    Measurement,
    ObjectAttributes,
    RelationsFunctional,
    RelationsSpatial,
    Comparison,
};

inline constexpr std::size_t kCategoryCount = 8;

inline constexpr std::array<QACategory, kCategoryCount> kAllCategories = {
    QACategory::BinaryGeneral,    QACategory::BinaryExistence,
    QACategory::BinaryLogical,    QACategory::Measurement,
    QACategory::ObjectAttributes, QACategory::RelationsFunctional,
    QACategory::RelationsSpatial, QACategory::Comparison,
};

std::string_view category_name(QACategory category);
std::optional<QACategory> category_from_name(std::string_view name);

/// Yes/no answer categories.
bool is_binary(QACategory category);
/// Categories judged by direct comparison rather than the LLM judge.
bool uses_exact_judging(QACategory category);

/// Target share of each category in a generated question set.
struct CategoryQuota {
    std::array<double, kCategoryCount> ratios{};

    /// Observed category distribution the generator reproduces by default:
    /// 18.6 / 16.6 / 18.4 / 5.2 / 17.0 / 0.8 / 18.7 / 4.7 percent in
    /// kAllCategories order.
    static CategoryQuota defaults();

    double ratio(QACategory category) const {
        return ratios[static_cast<std::size_t>(category)];
    }
    /// Ratios must be non-negative and sum to 1 within 1e-9.
    void validate() const;
};

/// Largest-remainder rounding of quota * n_total per category: floor each
/// share, then hand out the remaining items by descending fractional part
/// (ties break in kAllCategories order). Counts always sum to n_total.
std::array<int, kCategoryCount> largest_remainder_counts(const CategoryQuota& quotas,
                                                         int n_total);

enum class QAStatus { Generated, Validated, Rejected };

struct QAItem {
    std::string qa_id;
    QACategory category = QACategory::BinaryGeneral;
    std::string question;
    std::string gt_answer;
    std::vector<int> source_frames;
    std::vector<std::string> referenced_objects;  // normalized names
    QAStatus status = QAStatus::Generated;
    std::string rejection_reason;  // set iff status == Rejected
};

struct GenerationSummary {
    std::array<int, kCategoryCount> requested{};
    std::array<int, kCategoryCount> produced{};
};

struct GenerationResult {
    std::vector<QAItem> items;
    GenerationSummary summary;
};

/// Generate categorized questions with ground-truth answers from the
/// unified description. Per-category counts follow largest-remainder
/// rounding of the quotas; a category shortfall (the model produced fewer
/// usable items) is recorded in the summary, not fatal. The seed is woven
/// into each generation prompt so distinct seeds draw distinct samples.
GenerationResult generate_questions(const LlmSession& session,
                                    const UnifiedDescription& unified,
                                    const CategoryQuota& quotas, int n_total,
                                    std::uint64_t seed);

/// Three-stage validation: exact duplicate removal on normalized question
/// text, LLM semantic-duplicate detection within each category, then a
/// per-item LLM+LVLM consistency check against the unified description and
/// one source frame. Survivors become Validated; the rest carry
/// Rejected(reason).
std::vector<QAItem> validate_questions(const LlmSession& session, std::vector<QAItem> items,
                                       const UnifiedDescription& unified,
                                       std::span<const FrameSample> frames);

struct BalanceSummary {
    std::vector<std::pair<std::string, int>> removed_per_object;
    std::array<int, kCategoryCount> category_counts{};  // surviving items
};

/// Cap any single object's share of the surviving (validated) items at
/// max_object_share (up to integer slack 1/count). Excess items are
/// rejected by descending qa_id within the over-represented object.
std::vector<QAItem> balance_questions(std::vector<QAItem> items, double max_object_share,
                                      BalanceSummary* summary = nullptr);

}  // namespace osmeval::vqa
