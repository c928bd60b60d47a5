#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osmeval/condition.hpp"

namespace osmeval {

/// Ground-truth-vs-predicted point counts. Row = GT class, column =
/// predicted class; `unmatched[c]` counts GT points of class c with no
/// prediction within the association radius. A GT point of class c
/// contributes to exactly one of counts[c][*] or unmatched[c], so
/// row_sum(c) + unmatched[c] equals the GT point count of class c.
struct ConfusionMatrix {
    int class_count = 0;
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::int64_t> unmatched;

    static ConfusionMatrix zeros(int class_count);

    std::int64_t gt_count(int c) const;    // row sum + unmatched (n_c)
    std::int64_t pred_count(int c) const;  // column sum
};

/// Tally (gt, predicted) pairs; predicted < 0 means "no prediction" and
/// lands in unmatched. GT ids must be in [0, C): void GT points are
/// excluded upstream. Out-of-range ids raise ContractViolation.
ConfusionMatrix build_confusion(std::span<const std::int32_t> gt_classes,
                                std::span<const std::int32_t> matched_pred, int class_count);

/// Mean per-class recall: mean over classes with GT points of
/// TP_c / (TP_c + FN_c). Classes without GT points are excluded from the
/// mean. Throws UndefinedMetricError when no class has GT points.
double compute_macc(const ConfusionMatrix& cm);

/// IoU_c = TP_c / (TP_c + FP_c + FN_c); nullopt when the denominator is 0
/// (a class with neither GT points nor predictions).
std::vector<std::optional<double>> compute_iou_per_class(const ConfusionMatrix& cm);

/// Frequency-weighted mean IoU: sum(n_c * IoU_c) / sum(n_c) over classes
/// with n_c > 0. Throws UndefinedMetricError when all n_c are zero.
double compute_fmiou(const ConfusionMatrix& cm);

/// Relative change of a condition metric against the reference, in percent:
/// (condition - baseline) / baseline * 100. Baseline must be nonzero.
double compute_degradation(double baseline, double condition);

struct MetricAggregate {
    double min = 0.0;
    double max = 0.0;
    double avg = 0.0;
};

/// Elementwise min / max / arithmetic mean of a non-empty value list.
MetricAggregate aggregate_metric(std::span<const double> values);

struct SegmentationResult {
    double macc = 0.0;
    double fmiou = 0.0;
    std::vector<std::optional<double>> per_class_iou;
    std::vector<std::int64_t> class_point_counts;  // n_c per class
    ConditionKind condition = ConditionKind::Baseline;
    std::string scene_id;
};

struct ConditionAggregate {
    MetricAggregate macc;
    MetricAggregate fmiou;
};

/// Min/max/avg of each metric across the given per-condition results
/// (callers group by method before calling).
ConditionAggregate aggregate_conditions(std::span<const SegmentationResult> results);

}  // namespace osmeval
