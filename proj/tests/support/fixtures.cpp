#include "support/fixtures.hpp"

#include <atomic>
#include <fstream>

#include "osmeval/json_util.hpp"
#include "osmeval/ply_io.hpp"
#include "osmeval/scene_graph.hpp"

namespace osmeval::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    const auto id = counter.fetch_add(1);
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(id));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

const std::vector<unsigned char>& tiny_png() {
    // 1x1 RGB PNG, hand-assembled once.
    static const std::vector<unsigned char> bytes = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00,
        0x00, 0x90, 0x77, 0x53, 0xde, 0x00, 0x00, 0x00, 0x0c, 0x49, 0x44, 0x41, 0x54, 0x78,
        0x9c, 0x62, 0xf8, 0xcf, 0xc0, 0x00, 0x00, 0x00, 0x04, 0x00, 0x01, 0x27, 0x34, 0x27,
        0x0a, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    return bytes;
}

void write_keyframes(const fs::path& dir, int count) {
    fs::create_directories(dir);
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.png", i);
        std::ofstream out(dir / name, std::ios::binary);
        const auto& png = tiny_png();
        out.write(reinterpret_cast<const char*>(png.data()),
                  static_cast<std::streamsize>(png.size()));
        // Distinct trailing bytes so frames hash differently.
        out << "frame:" << i;
    }
}

LabeledPointCloud make_grid_cloud(std::size_t count, int class_count, double spacing) {
    LabeledPointCloud cloud;
    cloud.points.reserve(count);
    cloud.class_ids.reserve(count);
    const std::size_t side = 8;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = static_cast<double>(i % side) * spacing;
        const double y = static_cast<double>((i / side) % side) * spacing;
        const double z = static_cast<double>(i / (side * side)) * spacing;
        cloud.points.push_back({x, y, z});
        cloud.class_ids.push_back(static_cast<std::int32_t>(i % class_count));
    }
    return cloud;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) / static_cast<double>(1ull << 53);
}

}  // namespace

LabeledPointCloud make_random_cloud(std::size_t count, int class_count, double extent,
                                    std::uint64_t seed) {
    std::uint64_t state = seed;
    LabeledPointCloud cloud;
    cloud.points.reserve(count);
    cloud.class_ids.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        cloud.points.push_back(
            {unit_double(state) * extent, unit_double(state) * extent,
             unit_double(state) * extent});
        cloud.class_ids.push_back(
            static_cast<std::int32_t>(splitmix64(state) % static_cast<std::uint64_t>(class_count)));
    }
    return cloud;
}

namespace {

SceneGraph fixture_scene_graph(bool with_stairs) {
    SceneGraph graph;
    graph.nodes.push_back({"n0", "sofa", "a blue sofa", {{"color", "blue"}}, {}});
    graph.nodes.push_back({"n1", "table", "wooden table", {{"color", "brown"}}, {}});
    graph.nodes.push_back({"n2", "door", "entry door", {{"color", "white"}}, {}});
    graph.edges.push_back({"n0", "n1", "next to"});
    if (with_stairs) {
        for (int i = 0; i < 15; ++i) {
            graph.nodes.push_back({"stair_" + std::to_string(i), "stairs", "", {}, {}});
        }
    }
    return graph;
}

}  // namespace

FixtureDataset build_fixture_dataset(const fs::path& root) {
    FixtureDataset dataset;
    dataset.root = root;
    fs::create_directories(root);

    dataset.vocab_path = root / "vocab.txt";
    write_text_file(dataset.vocab_path, "wall\nfloor\nsofa\ntable\nstairs\nwall cabinet\n");

    dataset.scene_ids = {"apt_0"};
    const std::vector<std::string> conditions = {"baseline", "camera_light"};
    json scenes = json::array();
    for (const auto& scene : dataset.scene_ids) {
        json sequences = json::array();
        for (const auto& condition : conditions) {
            const LabeledPointCloud gt = make_grid_cloud(60, 6);
            const fs::path gt_path = root / "gt" / scene / (condition + ".ply");
            save_point_cloud(gt_path, gt);

            // Identity prediction: byte-for-byte the same cloud.
            const fs::path pred_path =
                root / "preds" / "identity" / scene / (condition + ".ply");
            save_point_cloud(pred_path, gt);

            const fs::path graph_path =
                root / "graphs" / "identity" / scene / (condition + ".json");
            save_scene_graph(graph_path, fixture_scene_graph(condition == "baseline"));

            const fs::path keyframes = root / "keyframes" / scene / condition;
            write_keyframes(keyframes, 5);

            sequences.push_back({{"condition", condition},
                                 {"gt_cloud", fs::relative(gt_path, root).string()},
                                 {"keyframes_dir", fs::relative(keyframes, root).string()}});
        }
        scenes.push_back({{"scene_id", scene}, {"sequences", std::move(sequences)}});
    }
    const json manifest{{"dataset_name", "fixture_apartments"},
                        {"class_vocabulary", "vocab.txt"},
                        {"scenes", std::move(scenes)}};
    dataset.manifest_path = root / "manifest.json";
    write_text_file(dataset.manifest_path, canonical_dump(manifest));
    return dataset;
}

fs::path write_fixture_config(const FixtureDataset& dataset, int n_total, std::uint64_t seed) {
    const json config{
        {"manifest", "manifest.json"},
        {"output_dir", "out"},
        {"methods", json::array({json{{"name", "identity"},
                                      {"pred_cloud_pattern", "preds/{method}/{scene}/{condition}.ply"},
                                      {"scene_graph_pattern",
                                       "graphs/{method}/{scene}/{condition}.json"},
                                      {"fps", 0.19}}})},
        {"gateway", json{{"model_id", "gemini-2.0-flash"}, {"temperature", 0.0}}},
        {"seg_eval", json{{"radius", 0.05}}},
        {"vqa", json{{"n_total", n_total},
                     {"seed", seed},
                     {"max_object_share", 0.3},
                     {"sampling", json{{"mode", "stride"}, {"value", 2}}}}},
        {"workers", 2}};
    const fs::path path = dataset.root / "config.json";
    write_text_file(path, canonical_dump(config));
    return path;
}

}  // namespace osmeval::testing
