#include "osmeval/association.hpp"

#include <cmath>
#include <unordered_map>

#include "osmeval/errors.hpp"

namespace osmeval {

namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t v : {static_cast<std::uint64_t>(k.x), static_cast<std::uint64_t>(k.y),
                                static_cast<std::uint64_t>(k.z)}) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

CellKey cell_of(const std::array<double, 3>& p, double cell_size) {
    return {static_cast<std::int64_t>(std::floor(p[0] / cell_size)),
            static_cast<std::int64_t>(std::floor(p[1] / cell_size)),
            static_cast<std::int64_t>(std::floor(p[2] / cell_size))};
}

double squared_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

PointAssociation associate_points(const LabeledPointCloud& gt, const LabeledPointCloud& pred,
                                  double radius) {
    if (!(radius > 0.0)) throw ContractViolation("association radius must be positive");
    if (gt.class_ids.size() != gt.points.size() || pred.class_ids.size() != pred.points.size()) {
        throw ContractViolation("point cloud arrays have mismatched lengths");
    }

    PointAssociation result;
    result.pred_index.assign(gt.size(), -1);
    result.pred_class.assign(gt.size(), -1);
    if (pred.empty() || gt.empty()) return result;

    // Cell size = radius, so any point within radius of a query lies in the
    // query's cell or one of its 26 neighbors.
    std::unordered_map<CellKey, std::vector<std::int32_t>, CellHash> grid;
    grid.reserve(pred.size() * 2);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        grid[cell_of(pred.points[i], radius)].push_back(static_cast<std::int32_t>(i));
    }

    const double radius_sq = radius * radius;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const auto& q = gt.points[i];
        const CellKey center = cell_of(q, radius);
        double best_sq = radius_sq;
        std::int32_t best_index = -1;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = grid.find({center.x + dx, center.y + dy, center.z + dz});
                    if (it == grid.end()) continue;
                    for (std::int32_t j : it->second) {
                        const double d = squared_distance(q, pred.points[j]);
                        if (d < best_sq || (d == best_sq && (best_index < 0 || j < best_index))) {
                            best_sq = d;
                            best_index = j;
                        }
                    }
                }
            }
        }
        if (best_index >= 0) {
            result.pred_index[i] = best_index;
            result.pred_class[i] = pred.class_ids[static_cast<std::size_t>(best_index)];
        }
    }
    return result;
}

SegmentationResult evaluate_segmentation(const LabeledPointCloud& gt,
                                         const LabeledPointCloud& pred, int class_count,
                                         double radius) {
    // Void GT points carry no class and are excluded from all metrics.
    LabeledPointCloud labeled;
    labeled.points.reserve(gt.size());
    labeled.class_ids.reserve(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (gt.class_ids[i] >= 0) {
            labeled.points.push_back(gt.points[i]);
            labeled.class_ids.push_back(gt.class_ids[i]);
        }
    }
    if (labeled.empty()) {
        throw UndefinedMetricError("segmentation metrics undefined: GT cloud has no labeled points");
    }

    // Predictions whose label matched no vocabulary class carry no usable
    // class; they must not shadow nearby labeled predictions either.
    LabeledPointCloud labeled_pred;
    labeled_pred.points.reserve(pred.size());
    labeled_pred.class_ids.reserve(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred.class_ids[i] >= 0) {
            labeled_pred.points.push_back(pred.points[i]);
            labeled_pred.class_ids.push_back(pred.class_ids[i]);
        }
    }

    const PointAssociation assoc = associate_points(labeled, labeled_pred, radius);
    const ConfusionMatrix cm =
        build_confusion(labeled.class_ids, assoc.pred_class, class_count);

    SegmentationResult result;
    result.macc = compute_macc(cm);
    result.fmiou = compute_fmiou(cm);
    result.per_class_iou = compute_iou_per_class(cm);
    result.class_point_counts.resize(static_cast<std::size_t>(class_count));
    for (int c = 0; c < class_count; ++c) {
        result.class_point_counts[static_cast<std::size_t>(c)] = cm.gt_count(c);
    }
    return result;
}

}  // namespace osmeval
