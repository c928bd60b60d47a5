#include <doctest.h>

#include <cmath>
#include <sstream>

#include "osmeval/cli/commands.hpp"
#include "osmeval/cli/render.hpp"
#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/ply_io.hpp"
#include "support/fixtures.hpp"
#include "support/scripted_transport.hpp"

using namespace osmeval;
using namespace osmeval::cli;
using osmeval::testing::TempDir;

namespace {

CommandContext make_context(const std::filesystem::path& config_path) {
    CommandContext ctx;
    ctx.config = load_run_config(config_path);
    static std::ostringstream sink;
    ctx.log = &sink;
    return ctx;
}

void write_seg_fixture(const std::filesystem::path& out_dir, const std::string& method,
                       const std::string& condition, double macc, double fmiou) {
    const json doc{{"method", method},
                   {"scene_id", "apt_0"},
                   {"condition", condition},
                   {"macc", macc},
                   {"fmiou", fmiou},
                   {"per_class_iou", json::array()},
                   {"class_point_counts", json::array()},
                   {"params", json::object()}};
    write_text_file(out_dir / "seg" / method / ("apt_0__" + condition + ".json"),
                    canonical_dump(doc));
}

}  // namespace

TEST_CASE("format_fixed: metric rendering uses round-half-even") {
    CHECK(format_fixed(0.2736, 3) == "0.274");
    CHECK(format_fixed(0.1875, 3) == "0.188");  // 187.5 rounds up to even 188
    CHECK(format_fixed(0.0625, 3) == "0.062");  // 62.5 rounds down to even 62
    CHECK(format_fixed(1.0, 3) == "1.000");
    CHECK(format_fixed(0.0, 3) == "0.000");
    CHECK(format_fixed(-0.0001, 3) == "0.000");
    CHECK(format_fixed(-5.154639, 2) == "-5.15");
    CHECK(format_fixed(7.692307, 2) == "7.69");
    CHECK(format_fixed(12.5, 0) == "12");
    CHECK(format_fixed(13.5, 0) == "14");
}

TEST_CASE("csv_escape quotes per RFC 4180") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
    CHECK(render_csv({{"a", "b,c"}, {"1", "2"}}) == "a,\"b,c\"\r\n1,2\r\n");
}

TEST_CASE("render_markdown_table shapes header and rows") {
    const std::string table = render_markdown_table({"x", "y"}, {{"1", "2"}});
    CHECK(table == "| x | y |\n| --- | --- |\n| 1 | 2 |\n");
}

TEST_CASE("cmd_validate: fixture dataset validates clean") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    const auto config = testing::write_fixture_config(dataset);
    CHECK(cmd_validate(make_context(config)) == kExitOk);
}

TEST_CASE("cmd_validate: missing GT file fails with a listed issue") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    std::filesystem::remove(dir / "gt" / "apt_0" / "baseline.ply");
    const auto config = testing::write_fixture_config(dataset);
    std::ostringstream log;
    CommandContext ctx = make_context(config);
    ctx.log = &log;
    CHECK(cmd_validate(ctx) == kExitFailure);
    CHECK(log.str().find("MissingGtCloud") != std::string::npos);
}

TEST_CASE("cmd_validate: NaN GT coordinates fail validation") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    LabeledPointCloud bad = testing::make_grid_cloud(10, 6);
    bad.points[3][2] = std::nan("");
    save_point_cloud(dir / "gt" / "apt_0" / "baseline.ply", bad);
    CHECK(cmd_validate(make_context(testing::write_fixture_config(dataset))) == kExitFailure);
}

TEST_CASE("cmd_validate: a method whose pattern matches nothing is fatal") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    std::filesystem::remove_all(dir / "preds");
    std::ostringstream log;
    CommandContext ctx = make_context(testing::write_fixture_config(dataset));
    ctx.log = &log;
    CHECK(cmd_validate(ctx) == kExitFailure);
    CHECK(log.str().find("resolves to no existing file") != std::string::npos);
}

TEST_CASE("cmd_validate: empty manifest fails") {
    TempDir dir;
    write_text_file(dir / "manifest.json",
                    R"({"dataset_name": "x", "class_vocabulary": "v.txt", "scenes": []})");
    write_text_file(dir / "config.json", R"({"manifest": "manifest.json", "output_dir": "out"})");
    CHECK(cmd_validate(make_context(dir / "config.json")) == kExitFailure);
}

TEST_CASE("cmd_seg_eval: identity prediction scores 1.0 everywhere") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    const auto config = testing::write_fixture_config(dataset);
    REQUIRE(cmd_seg_eval(make_context(config)) == kExitOk);

    const json result =
        parse_json_file(dir / "out" / "seg" / "identity" / "apt_0__baseline.json");
    CHECK(result["macc"].get<double>() == doctest::Approx(1.0));
    CHECK(result["fmiou"].get<double>() == doctest::Approx(1.0));
    CHECK(result["params"]["radius"].get<double>() == doctest::Approx(0.05));

    const json summary = parse_json_file(dir / "out" / "seg" / "summary.json");
    CHECK(summary["methods"]["identity"]["aggregate"]["macc"]["avg"].get<double>() ==
          doctest::Approx(1.0));
}

TEST_CASE("cmd_seg_eval: worked two-class example through the full pipeline") {
    TempDir dir;
    write_text_file(dir / "vocab.txt", "alpha\nbeta\n");
    LabeledPointCloud gt;
    for (int i = 0; i < 6; ++i) {
        gt.points.push_back({static_cast<double>(i), 0.0, 0.0});
        gt.class_ids.push_back(i < 3 ? 0 : 1);
    }
    LabeledPointCloud pred = gt;
    pred.class_ids = {0, 0, 1, 1, 1, 1};
    save_point_cloud(dir / "gt.ply", gt);
    save_point_cloud(dir / "preds" / "m" / "s0" / "baseline.ply", pred);
    write_text_file(dir / "manifest.json", R"({
        "dataset_name": "worked", "class_vocabulary": "vocab.txt",
        "scenes": [{"scene_id": "s0",
                    "sequences": [{"condition": "baseline", "gt_cloud": "gt.ply"}]}]})");
    write_text_file(dir / "config.json", R"({
        "manifest": "manifest.json", "output_dir": "out",
        "methods": [{"name": "m", "pred_cloud_pattern": "preds/{method}/{scene}/{condition}.ply"}]})");
    REQUIRE(cmd_seg_eval(make_context(dir / "config.json")) == kExitOk);
    const json result = parse_json_file(dir / "out" / "seg" / "m" / "s0__baseline.json");
    CHECK(result["macc"].get<double>() == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    CHECK(result["fmiou"].get<double>() == doctest::Approx(17.0 / 24.0).epsilon(1e-9));
}

TEST_CASE("cmd_seg_eval: open-vocabulary sidecar labels are matched into the vocabulary") {
    TempDir dir;
    write_text_file(dir / "vocab.txt", "wall\nfloor\nsofa\ntable\nstairs\nwall cabinet\n");
    LabeledPointCloud gt;
    gt.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    gt.class_ids = {2, 5, 2};
    save_point_cloud(dir / "gt.ply", gt);
    LabeledPointCloud pred = gt;
    pred.class_ids = {0, 1, 0};  // indexes into the sidecar label list
    save_point_cloud(dir / "preds" / "ov" / "s0" / "baseline.ply", pred);
    write_text_file(dir / "preds" / "ov" / "s0" / "baseline.labels.txt", "Sofa\nwall_cabinet\n");
    write_text_file(dir / "manifest.json", R"({
        "dataset_name": "openvocab", "class_vocabulary": "vocab.txt",
        "scenes": [{"scene_id": "s0",
                    "sequences": [{"condition": "baseline", "gt_cloud": "gt.ply"}]}]})");
    write_text_file(dir / "config.json", R"({
        "manifest": "manifest.json", "output_dir": "out",
        "methods": [{"name": "ov", "pred_cloud_pattern": "preds/{method}/{scene}/{condition}.ply"}]})");
    REQUIRE(cmd_seg_eval(make_context(dir / "config.json")) == kExitOk);
    const json result = parse_json_file(dir / "out" / "seg" / "ov" / "s0__baseline.json");
    CHECK(result["macc"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cmd_seg_eval: a condition without predictions is skipped and noted") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    std::filesystem::remove(dir / "preds" / "identity" / "apt_0" / "camera_light.ply");
    const auto config = testing::write_fixture_config(dataset);
    REQUIRE(cmd_seg_eval(make_context(config)) == kExitOk);
    CHECK_FALSE(
        std::filesystem::exists(dir / "out" / "seg" / "identity" / "apt_0__camera_light.json"));
    const json summary = parse_json_file(dir / "out" / "seg" / "summary.json");
    REQUIRE(summary["skipped"].size() == 1);
    CHECK(summary["skipped"][0]["condition"] == "camera_light");
}

TEST_CASE("cmd_report: reported-values fixture reproduces the aggregate row and degradations") {
    TempDir dir;
    write_text_file(dir / "config.json", R"({
        "manifest": "manifest.json", "output_dir": "out",
        "methods": [{"name": "conceptgraphs", "fps": 0.19}, {"name": "openscene", "fps": 0.13}]})");
    const auto out_dir = dir / "out";
    // ReplicaCAD-style mAcc rows: two methods over five conditions.
    write_seg_fixture(out_dir, "conceptgraphs", "baseline", 0.291, 0.324);
    write_seg_fixture(out_dir, "conceptgraphs", "camera_light", 0.276, 0.296);
    write_seg_fixture(out_dir, "conceptgraphs", "dynamic_lights", 0.260, 0.299);
    write_seg_fixture(out_dir, "conceptgraphs", "nominal_lights", 0.258, 0.310);
    write_seg_fixture(out_dir, "conceptgraphs", "velocity", 0.283, 0.309);
    write_seg_fixture(out_dir, "openscene", "baseline", 0.130, 0.484);
    write_seg_fixture(out_dir, "openscene", "camera_light", 0.127, 0.482);
    write_seg_fixture(out_dir, "openscene", "dynamic_lights", 0.140, 0.479);
    write_seg_fixture(out_dir, "openscene", "nominal_lights", 0.136, 0.469);
    write_seg_fixture(out_dir, "openscene", "velocity", 0.132, 0.475);

    REQUIRE(cmd_report(make_context(dir / "config.json")) == kExitOk);

    const std::string macc_csv = read_text_file(out_dir / "report" / "segmentation_macc.csv");
    CHECK(macc_csv.find("conceptgraphs,0.19,0.291,0.258,0.276,0.260,0.283,0.258,0.291,0.274,1") !=
          std::string::npos);

    const std::string degradation_csv = read_text_file(out_dir / "report" / "degradation.csv");
    CHECK(degradation_csv.find("conceptgraphs,macc,camera_light,-5.15") != std::string::npos);
    CHECK(degradation_csv.find("openscene,macc,dynamic_lights,7.69") != std::string::npos);
    CHECK(degradation_csv.find("conceptgraphs,macc,baseline,0.00") != std::string::npos);

    const std::string markdown = read_text_file(out_dir / "report" / "report.md");
    CHECK(markdown.find("model_id: gemini-2.0-flash") != std::string::npos);
    CHECK(markdown.find("prompt template hashes") != std::string::npos);

    // Re-running produces byte-identical outputs.
    REQUIRE(cmd_report(make_context(dir / "config.json")) == kExitOk);
    CHECK(read_text_file(out_dir / "report" / "segmentation_macc.csv") == macc_csv);
}

TEST_CASE("cmd_report: baseline-only results give a single 0.00 degradation row") {
    TempDir dir;
    write_text_file(dir / "config.json", R"({
        "manifest": "manifest.json", "output_dir": "out",
        "methods": [{"name": "m"}]})");
    write_seg_fixture(dir / "out", "m", "baseline", 0.3, 0.4);
    REQUIRE(cmd_report(make_context(dir / "config.json")) == kExitOk);
    const std::string degradation_csv =
        read_text_file(dir / "out" / "report" / "degradation.csv");
    CHECK(degradation_csv.find("m,macc,baseline,0.00") != std::string::npos);
    CHECK(degradation_csv.find("m,fmiou,baseline,0.00") != std::string::npos);
}

TEST_CASE("cmd_report: missing reference condition omits the degradation table with a warning") {
    TempDir dir;
    write_text_file(dir / "config.json", R"({
        "manifest": "manifest.json", "output_dir": "out",
        "methods": [{"name": "m"}],
        "report": {"reference_condition": "velocity"}})");
    write_seg_fixture(dir / "out", "m", "camera_light", 0.3, 0.4);
    std::ostringstream log;
    CommandContext ctx = make_context(dir / "config.json");
    ctx.log = &log;
    REQUIRE(cmd_report(ctx) == kExitOk);
    CHECK_FALSE(std::filesystem::exists(dir / "out" / "report" / "degradation.csv"));
    CHECK(log.str().find("degradation table omitted") != std::string::npos);
}

TEST_CASE("load_run_config rejects unknown keys and bad values") {
    TempDir dir;
    write_text_file(dir / "unknown.json",
                    R"({"manifest": "m.json", "output_dir": "out", "surprise": 1})");
    CHECK_THROWS_AS(load_run_config(dir / "unknown.json"), ConfigError);

    write_text_file(dir / "nested.json", R"({
        "manifest": "m.json", "output_dir": "out",
        "seg_eval": {"radius": 0.05, "typo_field": true}})");
    CHECK_THROWS_AS(load_run_config(dir / "nested.json"), ConfigError);

    write_text_file(dir / "badradius.json", R"({
        "manifest": "m.json", "output_dir": "out", "seg_eval": {"radius": -1}})");
    CHECK_THROWS_AS(load_run_config(dir / "badradius.json"), ConfigError);

    write_text_file(dir / "notjson.json", "{");
    CHECK_THROWS_AS(load_run_config(dir / "notjson.json"), ConfigError);
}

TEST_CASE("resolve_n_total: explicit value wins, else dataset-sensitive default") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    const DatasetManifest with_baseline = load_manifest(dataset.manifest_path);

    VqaSettings settings;
    CHECK(resolve_n_total(settings, with_baseline) == 184);
    settings.n_total = 24;
    CHECK(resolve_n_total(settings, with_baseline) == 24);

    DatasetManifest no_baseline = with_baseline;
    for (auto& scene : no_baseline.scenes) {
        std::erase_if(scene.sequences, [](const SequenceSpec& seq) {
            return seq.condition == ConditionKind::Baseline;
        });
    }
    settings.n_total.reset();
    CHECK(resolve_n_total(settings, no_baseline) == 76);
}

TEST_CASE("matcher config values are validated") {
    TempDir dir;
    write_text_file(dir / "embed.json", R"({
        "manifest": "m.json", "output_dir": "out",
        "seg_eval": {"matcher": "embedding", "similarity_threshold": 0.9}})");
    CHECK(load_run_config(dir / "embed.json").seg.matcher == "embedding");
    write_text_file(dir / "bogus.json", R"({
        "manifest": "m.json", "output_dir": "out", "seg_eval": {"matcher": "fuzzy"}})");
    CHECK_THROWS_AS(load_run_config(dir / "bogus.json"), ConfigError);
}

TEST_CASE("resolve_pattern expands method/scene/condition placeholders") {
    TempDir dir;
    write_text_file(dir / "config.json", R"({"manifest": "m.json", "output_dir": "out"})");
    const RunConfig config = load_run_config(dir / "config.json");
    const auto path = resolve_pattern(config, "preds/{method}/{scene}/{condition}.ply", "bbq",
                                      "apt_1", "velocity");
    CHECK(path == dir / "preds" / "bbq" / "apt_1" / "velocity.ply");
    CHECK(resolve_pattern(config, "", "m", "s", "baseline").empty());
}

TEST_CASE("cmd_scenario_emit writes five documents per scene") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    const auto config = testing::write_fixture_config(dataset);
    REQUIRE(cmd_scenario_emit(make_context(config)) == kExitOk);
    for (const char* name :
         {"baseline", "nominal_lights", "camera_light", "dynamic_lights", "velocity"}) {
        CHECK(std::filesystem::exists(dir / "out" / "scenarios" / "apt_0" /
                                      (std::string(name) + ".json")));
    }
    const json doc = parse_json_file(dir / "out" / "scenarios" / "apt_0" / "velocity.json");
    CHECK(doc["linear_velocity_mps"].get<double>() == doctest::Approx(1.5));
}

TEST_CASE("qa stages abort on replay miss and preserve partials without clobbering outputs") {
    TempDir dir;
    const auto dataset = testing::build_fixture_dataset(dir.path());
    const auto config = testing::write_fixture_config(dataset);

    CommandContext ctx = make_context(config);
    std::ostringstream log;
    ctx.log = &log;
    ctx.replay_dir = (dir / "empty_store").string();  // nothing recorded -> replay miss

    // A previous complete output must survive the failed run.
    const auto qa_path = dir / "out" / "qa" / "apt_0" / "baseline" / "qa_set.json";
    write_text_file(qa_path, "previous run\n");

    CHECK(cmd_qa_gen(ctx) == kExitFailure);
    CHECK(read_text_file(qa_path) == "previous run\n");
    CHECK(std::filesystem::exists(qa_path.string() + ".partial"));
    CHECK(log.str().find("aborted") != std::string::npos);
}
