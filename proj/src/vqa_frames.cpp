#include "osmeval/vqa/frames.hpp"

#include <algorithm>

#include "osmeval/errors.hpp"

namespace osmeval::vqa {

std::vector<FrameSample> sample_keyframes(const std::filesystem::path& keyframes_dir,
                                          const SamplingPolicy& policy,
                                          const std::string& scene_id, ConditionKind condition) {
    if (!std::filesystem::is_directory(keyframes_dir)) {
        throw IngestError("keyframes directory not found: " + keyframes_dir.string());
    }
    std::vector<std::filesystem::path> images;
    for (const auto& entry : std::filesystem::directory_iterator(keyframes_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") images.push_back(entry.path());
    }
    if (images.empty()) {
        throw IngestError("keyframes directory holds no images: " + keyframes_dir.string());
    }
    std::sort(images.begin(), images.end());

    const int n = static_cast<int>(images.size());
    std::vector<int> selected;
    if (policy.mode == SamplingPolicy::Mode::Stride) {
        if (policy.value <= 0) throw ContractViolation("sampling stride must be positive");
        for (int i = 0; i < n; i += policy.value) selected.push_back(i);
    } else {
        if (policy.value <= 0) throw ContractViolation("sampling count must be positive");
        const int count = std::min(policy.value, n);
        if (count == 1) {
            selected.push_back(n - 1);
        } else {
            for (int i = 0; i < count; ++i) {
                selected.push_back(static_cast<int>(
                    static_cast<long long>(i) * (n - 1) / (count - 1)));
            }
        }
    }
    if (selected.empty() || selected.back() != n - 1) selected.push_back(n - 1);
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    std::vector<FrameSample> frames;
    frames.reserve(selected.size());
    for (int idx : selected) {
        frames.push_back({idx, images[static_cast<std::size_t>(idx)], scene_id, condition});
    }
    return frames;
}

}  // namespace osmeval::vqa
