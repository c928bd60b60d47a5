#include "osmeval/seg_metrics.hpp"

#include <algorithm>
#include <string>

#include "osmeval/errors.hpp"

namespace osmeval {

ConfusionMatrix ConfusionMatrix::zeros(int class_count) {
    if (class_count <= 0) throw ContractViolation("class_count must be positive");
    ConfusionMatrix cm;
    cm.class_count = class_count;
    cm.counts.assign(static_cast<std::size_t>(class_count),
                     std::vector<std::int64_t>(static_cast<std::size_t>(class_count), 0));
    cm.unmatched.assign(static_cast<std::size_t>(class_count), 0);
    return cm;
}

std::int64_t ConfusionMatrix::gt_count(int c) const {
    std::int64_t total = unmatched[static_cast<std::size_t>(c)];
    for (std::int64_t v : counts[static_cast<std::size_t>(c)]) total += v;
    return total;
}

std::int64_t ConfusionMatrix::pred_count(int c) const {
    std::int64_t total = 0;
    for (const auto& row : counts) total += row[static_cast<std::size_t>(c)];
    return total;
}

ConfusionMatrix build_confusion(std::span<const std::int32_t> gt_classes,
                                std::span<const std::int32_t> matched_pred, int class_count) {
    if (gt_classes.size() != matched_pred.size()) {
        throw ContractViolation("gt and matched prediction arrays differ in length");
    }
    ConfusionMatrix cm = ConfusionMatrix::zeros(class_count);
    for (std::size_t i = 0; i < gt_classes.size(); ++i) {
        const std::int32_t g = gt_classes[i];
        if (g < 0 || g >= class_count) {
            throw ContractViolation("gt class id " + std::to_string(g) +
                                    " out of range at point " + std::to_string(i) +
                                    " (void points must be excluded upstream)");
        }
        const std::int32_t p = matched_pred[i];
        if (p < 0) {
            ++cm.unmatched[static_cast<std::size_t>(g)];
        } else if (p >= class_count) {
            throw ContractViolation("predicted class id " + std::to_string(p) +
                                    " out of range at point " + std::to_string(i));
        } else {
            ++cm.counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
        }
    }
    return cm;
}

double compute_macc(const ConfusionMatrix& cm) {
    double sum = 0.0;
    int evaluated = 0;
    for (int c = 0; c < cm.class_count; ++c) {
        const std::int64_t n_c = cm.gt_count(c);
        if (n_c == 0) continue;
        const std::int64_t tp = cm.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        sum += static_cast<double>(tp) / static_cast<double>(n_c);
        ++evaluated;
    }
    if (evaluated == 0) throw UndefinedMetricError("mAcc undefined: no class has GT points");
    return sum / evaluated;
}

std::vector<std::optional<double>> compute_iou_per_class(const ConfusionMatrix& cm) {
    std::vector<std::optional<double>> iou(static_cast<std::size_t>(cm.class_count));
    for (int c = 0; c < cm.class_count; ++c) {
        const std::int64_t tp = cm.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        const std::int64_t fn = cm.gt_count(c) - tp;
        const std::int64_t fp = cm.pred_count(c) - tp;
        const std::int64_t denom = tp + fp + fn;
        if (denom > 0) {
            iou[static_cast<std::size_t>(c)] =
                static_cast<double>(tp) / static_cast<double>(denom);
        }
    }
    return iou;
}

double compute_fmiou(const ConfusionMatrix& cm) {
    const auto iou = compute_iou_per_class(cm);
    double weighted = 0.0;
    std::int64_t total = 0;
    for (int c = 0; c < cm.class_count; ++c) {
        const std::int64_t n_c = cm.gt_count(c);
        if (n_c == 0) continue;
        // n_c > 0 implies the IoU denominator is positive.
        weighted += static_cast<double>(n_c) * iou[static_cast<std::size_t>(c)].value();
        total += n_c;
    }
    if (total == 0) throw UndefinedMetricError("f-mIoU undefined: all class point counts are 0");
    return weighted / static_cast<double>(total);
}

double compute_degradation(double baseline, double condition) {
    if (baseline == 0.0) {
        throw UndefinedMetricError("degradation undefined for zero baseline");
    }
    return (condition - baseline) / baseline * 100.0;
}

MetricAggregate aggregate_metric(std::span<const double> values) {
    if (values.empty()) throw ContractViolation("cannot aggregate an empty value list");
    MetricAggregate agg;
    agg.min = values[0];
    agg.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        agg.min = std::min(agg.min, v);
        agg.max = std::max(agg.max, v);
        sum += v;
    }
    agg.avg = sum / static_cast<double>(values.size());
    return agg;
}

ConditionAggregate aggregate_conditions(std::span<const SegmentationResult> results) {
    if (results.empty()) throw ContractViolation("cannot aggregate an empty result list");
    std::vector<double> macc_values, fmiou_values;
    macc_values.reserve(results.size());
    fmiou_values.reserve(results.size());
    for (const auto& r : results) {
        macc_values.push_back(r.macc);
        fmiou_values.push_back(r.fmiou);
    }
    return {aggregate_metric(macc_values), aggregate_metric(fmiou_values)};
}

}  // namespace osmeval
