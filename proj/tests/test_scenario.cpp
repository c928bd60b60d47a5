#include <doctest.h>

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"
#include "osmeval/scenario.hpp"
#include "support/fixtures.hpp"

using namespace osmeval;
using osmeval::testing::TempDir;

TEST_CASE("emit_condition_config: nominal lights has no sources and nominal velocities") {
    const ConditionConfig config = emit_condition_config(ConditionKind::NominalLights);
    CHECK(config.light_setup.empty());
    CHECK(config.light_schedule.empty());
    CHECK(config.linear_velocity_mps == doctest::Approx(0.75));
    CHECK(config.angular_velocity_radps == doctest::Approx(0.8));
}

TEST_CASE("emit_condition_config: velocity condition doubles both reference velocities") {
    const ConditionConfig config = emit_condition_config(ConditionKind::Velocity);
    CHECK(config.linear_velocity_mps == doctest::Approx(1.5));
    CHECK(config.angular_velocity_radps == doctest::Approx(1.6));
    CHECK(config.light_setup.empty());
}

TEST_CASE("emit_condition_config: camera light is exactly one directional camera-attached source") {
    const ConditionConfig config = emit_condition_config(ConditionKind::CameraLight);
    REQUIRE(config.light_setup.size() == 1);
    CHECK(config.light_setup[0].kind == LightKind::Directional);
    CHECK(config.light_setup[0].attached_to == LightAttach::Camera);
    CHECK(config.linear_velocity_mps == doctest::Approx(0.75));
}

TEST_CASE("emit_condition_config: dynamic lights carries a schedule with at least two waypoints") {
    const ConditionConfig config = emit_condition_config(ConditionKind::DynamicLights);
    CHECK(config.light_schedule.size() >= 2);
    CHECK_FALSE(config.light_setup.empty());
}

TEST_CASE("emit_condition_config: baseline emits a placeholder the validator warns about") {
    const ConditionConfig config = emit_condition_config(ConditionKind::Baseline);
    CHECK(config.light_setup_placeholder);
    const auto issues = validate_condition_config(config);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].code == IssueCode::UnfilledLightPlaceholder);

    ConditionConfig filled = config;
    filled.light_setup_placeholder = false;
    CHECK(validate_condition_config(filled).empty());
}

TEST_CASE("emit is total over all five conditions and custom bases scale") {
    ConditionConfig base = default_condition_base();
    base.linear_velocity_mps = 1.0;
    base.angular_velocity_radps = 0.5;
    for (ConditionKind kind : kAllConditions) {
        const ConditionConfig config = emit_condition_config(kind, base);
        CHECK(config.condition == kind);
    }
    CHECK(emit_condition_config(ConditionKind::Velocity, base).linear_velocity_mps ==
          doctest::Approx(2.0));
}

TEST_CASE("condition configs round trip through their own parser") {
    TempDir dir;
    for (ConditionKind kind : kAllConditions) {
        const ConditionConfig config = emit_condition_config(kind);
        const auto path = dir / (std::string(condition_name(kind)) + ".json");
        save_condition_config(path, config);
        const ConditionConfig loaded = load_condition_config(path);
        CHECK(loaded.condition == config.condition);
        CHECK(loaded.light_setup.size() == config.light_setup.size());
        CHECK(loaded.light_schedule.size() == config.light_schedule.size());
        CHECK(loaded.linear_velocity_mps == config.linear_velocity_mps);
        CHECK(loaded.light_setup_placeholder == config.light_setup_placeholder);
        // Byte identity through a second serialization.
        save_condition_config(dir / "again.json", loaded);
        CHECK(read_text_file(path) == read_text_file(dir / "again.json"));
    }
}

TEST_CASE("condition config parser enforces structural invariants") {
    TempDir dir;
    ConditionConfig dynamic = emit_condition_config(ConditionKind::DynamicLights);
    dynamic.light_schedule.clear();
    write_text_file(dir / "bad_dynamic.json", canonical_dump(condition_config_to_json(dynamic)));
    CHECK_THROWS_AS(load_condition_config(dir / "bad_dynamic.json"), SchemaError);

    ConditionConfig nominal = emit_condition_config(ConditionKind::NominalLights);
    nominal.light_setup.push_back(LightSpec{});
    write_text_file(dir / "bad_nominal.json", canonical_dump(condition_config_to_json(nominal)));
    CHECK_THROWS_AS(load_condition_config(dir / "bad_nominal.json"), SchemaError);
}
