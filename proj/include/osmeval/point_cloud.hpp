#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace osmeval {

/// Per-point predicted/ground-truth class id meaning "no label / void".
inline constexpr std::int32_t kVoidClass = -1;

/// 3D points with per-point class labels; the unit of segmentation
/// evaluation. instance_ids is empty when the source carries none.
struct LabeledPointCloud {
    std::vector<std::array<double, 3>> points;
    std::vector<std::int32_t> class_ids;
    std::vector<std::int32_t> instance_ids;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_instances() const { return !instance_ids.empty(); }
};

}  // namespace osmeval
