#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "osmeval/point_cloud.hpp"

namespace osmeval::testing {

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "osmeval");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

/// Minimal valid 1x1 PNG (the pipeline never decodes images; it hashes and
/// forwards bytes).
const std::vector<unsigned char>& tiny_png();

/// Write `count` keyframe images named frame_####.png with distinct bytes.
void write_keyframes(const std::filesystem::path& dir, int count);

/// Deterministic cloud: `count` points on a jittered grid, classes cycling
/// through [0, class_count).
LabeledPointCloud make_grid_cloud(std::size_t count, int class_count, double spacing = 0.5);

/// Uniform random cloud in [0, extent]^3 with random classes; splitmix64
/// driven so identical seeds reproduce identical clouds everywhere.
LabeledPointCloud make_random_cloud(std::size_t count, int class_count, double extent,
                                    std::uint64_t seed);

/// Everything the CLI fixture dataset provides, rooted at `root`:
/// vocab, GT clouds, identity predictions, scene graphs, keyframes, and a
/// manifest referencing them.
struct FixtureDataset {
    std::filesystem::path root;
    std::filesystem::path manifest_path;
    std::filesystem::path vocab_path;
    std::vector<std::string> scene_ids;
};

FixtureDataset build_fixture_dataset(const std::filesystem::path& root);

/// Run-config document for the fixture dataset, written to root/config.json.
std::filesystem::path write_fixture_config(const FixtureDataset& dataset, int n_total = 16,
                                           std::uint64_t seed = 7);

}  // namespace osmeval::testing
