#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "osmeval/condition.hpp"

namespace osmeval::vqa {

struct FrameSample {
    int frame_id = 0;  // ordinal in the sorted keyframe listing
    std::filesystem::path image_path;
    std::string scene_id;
    ConditionKind condition = ConditionKind::Baseline;
};

struct SamplingPolicy {
    enum class Mode { Stride, Count };
    Mode mode = Mode::Stride;
    int value = 10;
};

/// Deterministic keyframe selection from a directory of images (png/jpg,
/// sorted by filename). Stride mode keeps every value-th frame; Count mode
/// spreads `value` frames evenly. The final frame is always included.
/// Throws IngestError when the directory is missing or holds no images.
std::vector<FrameSample> sample_keyframes(const std::filesystem::path& keyframes_dir,
                                          const SamplingPolicy& policy,
                                          const std::string& scene_id, ConditionKind condition);

}  // namespace osmeval::vqa
