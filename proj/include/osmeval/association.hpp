#pragma once

#include <cstdint>
#include <vector>

#include "osmeval/point_cloud.hpp"
#include "osmeval/seg_metrics.hpp"

namespace osmeval {

/// Per-GT-point association result. pred_index[i] / pred_class[i] is -1 when
/// no predicted point lies within the radius of GT point i.
struct PointAssociation {
    std::vector<std::int32_t> pred_index;
    std::vector<std::int32_t> pred_class;
};

/// For each GT point, the nearest predicted point within `radius` (meters),
/// found through a uniform-grid spatial index. Equal distances break to the
/// lowest predicted point index. An empty prediction cloud yields all -1.
PointAssociation associate_points(const LabeledPointCloud& gt, const LabeledPointCloud& pred,
                                  double radius);

/// Full per-sequence evaluation: drop void GT points, associate GT to
/// prediction, tally the confusion matrix, compute mAcc / per-class IoU /
/// f-mIoU. scene_id and condition are left for the caller to fill.
SegmentationResult evaluate_segmentation(const LabeledPointCloud& gt,
                                         const LabeledPointCloud& pred, int class_count,
                                         double radius);

}  // namespace osmeval
