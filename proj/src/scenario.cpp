#include "osmeval/scenario.hpp"

#include "osmeval/errors.hpp"
#include "osmeval/json_util.hpp"

namespace osmeval {

namespace {

constexpr double kNominalLinearVelocity = 0.75;  // m/s
constexpr double kNominalAngularVelocity = 0.8;  // rad/s

std::string_view light_kind_name(LightKind kind) {
    return kind == LightKind::Point ? "point" : "directional";
}

std::string_view attach_name(LightAttach attach) {
    return attach == LightAttach::World ? "world" : "camera";
}

json light_to_json(const LightSpec& light) {
    return json{{"kind", light_kind_name(light.kind)},
                {"attached_to", attach_name(light.attached_to)},
                {"intensity", light.intensity},
                {"position_or_direction",
                 {light.position_or_direction[0], light.position_or_direction[1],
                  light.position_or_direction[2]}}};
}

LightSpec light_from_json(const json& doc, const std::string& context) {
    expect_object(doc, {"kind", "attached_to", "intensity", "position_or_direction"}, context);
    LightSpec light;
    const std::string kind = require_string(doc, "kind", context);
    if (kind == "point") {
        light.kind = LightKind::Point;
    } else if (kind == "directional") {
        light.kind = LightKind::Directional;
    } else {
        throw SchemaError(context + ": unknown light kind '" + kind + "'");
    }
    const std::string attach = require_string(doc, "attached_to", context);
    if (attach == "world") {
        light.attached_to = LightAttach::World;
    } else if (attach == "camera") {
        light.attached_to = LightAttach::Camera;
    } else {
        throw SchemaError(context + ": unknown light attachment '" + attach + "'");
    }
    light.intensity = require_number(doc, "intensity", context);
    const json& pos = require_field(doc, "position_or_direction", context);
    if (!pos.is_array() || pos.size() != 3) {
        throw SchemaError(context + ": 'position_or_direction' must be an array of 3 numbers");
    }
    light.position_or_direction = {pos[0].get<double>(), pos[1].get<double>(),
                                   pos[2].get<double>()};
    return light;
}

}  // namespace

ConditionConfig default_condition_base() {
    ConditionConfig base;
    base.linear_velocity_mps = kNominalLinearVelocity;
    base.angular_velocity_radps = kNominalAngularVelocity;
    return base;
}

ConditionConfig emit_condition_config(ConditionKind kind, const ConditionConfig& base) {
    ConditionConfig config = base;
    config.condition = kind;
    config.light_setup.clear();
    config.light_schedule.clear();
    config.light_setup_placeholder = false;

    switch (kind) {
        case ConditionKind::Baseline: {
            // Static, non-uniform world lights; actual positions are
            // scene-specific, so emit a placeholder the user fills in.
            LightSpec placeholder;
            placeholder.kind = LightKind::Point;
            placeholder.attached_to = LightAttach::World;
            placeholder.intensity = 0.0;
            config.light_setup = {placeholder};
            config.light_setup_placeholder = true;
            break;
        }
        case ConditionKind::NominalLights:
            // Mesh-emitted light only: no explicit light sources.
            break;
        case ConditionKind::CameraLight: {
            LightSpec camera_light;
            camera_light.kind = LightKind::Directional;
            camera_light.attached_to = LightAttach::Camera;
            camera_light.intensity = 1.0;
            camera_light.position_or_direction = {0.0, 0.0, -1.0};
            config.light_setup = {camera_light};
            break;
        }
        case ConditionKind::DynamicLights: {
            LightSpec bright;
            bright.intensity = 1.0;
            bright.position_or_direction = {0.0, 2.0, 0.0};
            LightSpec dim = bright;
            dim.intensity = 0.25;
            config.light_setup = {bright};
            config.light_schedule = {{0, {bright}}, {1, {dim}}};
            break;
        }
        case ConditionKind::Velocity:
            config.linear_velocity_mps = 2.0 * base.linear_velocity_mps;
            config.angular_velocity_radps = 2.0 * base.angular_velocity_radps;
            break;
    }
    return config;
}

json condition_config_to_json(const ConditionConfig& config) {
    json lights = json::array();
    for (const auto& light : config.light_setup) lights.push_back(light_to_json(light));
    json schedule = json::array();
    for (const auto& entry : config.light_schedule) {
        json entry_lights = json::array();
        for (const auto& light : entry.lights) entry_lights.push_back(light_to_json(light));
        schedule.push_back(
            {{"waypoint_index", entry.waypoint_index}, {"lights", std::move(entry_lights)}});
    }
    return json{{"condition", condition_name(config.condition)},
                {"light_setup", std::move(lights)},
                {"light_schedule", std::move(schedule)},
                {"linear_velocity_mps", config.linear_velocity_mps},
                {"angular_velocity_radps", config.angular_velocity_radps},
                {"light_setup_placeholder", config.light_setup_placeholder}};
}

ConditionConfig condition_config_from_json(const json& doc, const std::string& context) {
    expect_object(doc,
                  {"condition", "light_setup", "light_schedule", "linear_velocity_mps",
                   "angular_velocity_radps", "light_setup_placeholder"},
                  context);
    ConditionConfig config;
    const std::string cond = require_string(doc, "condition", context);
    const auto kind = condition_from_name(cond);
    if (!kind) throw SchemaError(context + ": unknown condition '" + cond + "'");
    config.condition = *kind;

    const json& lights = require_field(doc, "light_setup", context);
    if (!lights.is_array()) throw SchemaError(context + ": 'light_setup' must be an array");
    for (const json& l : lights) config.light_setup.push_back(light_from_json(l, context));

    const json& schedule = require_field(doc, "light_schedule", context);
    if (!schedule.is_array()) throw SchemaError(context + ": 'light_schedule' must be an array");
    for (const json& e : schedule) {
        expect_object(e, {"waypoint_index", "lights"}, context);
        LightScheduleEntry entry;
        entry.waypoint_index = static_cast<int>(require_number(e, "waypoint_index", context));
        const json& entry_lights = require_field(e, "lights", context);
        if (!entry_lights.is_array()) {
            throw SchemaError(context + ": schedule 'lights' must be an array");
        }
        for (const json& l : entry_lights) entry.lights.push_back(light_from_json(l, context));
        config.light_schedule.push_back(std::move(entry));
    }

    config.linear_velocity_mps = require_number(doc, "linear_velocity_mps", context);
    config.angular_velocity_radps = require_number(doc, "angular_velocity_radps", context);
    if (doc.contains("light_setup_placeholder")) {
        config.light_setup_placeholder = doc["light_setup_placeholder"].get<bool>();
    }

    if (config.condition == ConditionKind::DynamicLights && config.light_schedule.empty()) {
        throw SchemaError(context + ": dynamic_lights requires a non-empty light_schedule");
    }
    if (config.condition == ConditionKind::NominalLights && !config.light_setup.empty()) {
        throw SchemaError(context + ": nominal_lights must have an empty light_setup");
    }
    return config;
}

ConditionConfig load_condition_config(const std::filesystem::path& path) {
    return condition_config_from_json(parse_json_file(path), path.string());
}

void save_condition_config(const std::filesystem::path& path, const ConditionConfig& config) {
    write_text_file(path, canonical_dump(condition_config_to_json(config)));
}

std::vector<Issue> validate_condition_config(const ConditionConfig& config) {
    std::vector<Issue> issues;
    if (config.light_setup_placeholder) {
        issues.push_back({IssueCode::UnfilledLightPlaceholder,
                          "baseline light_setup still holds placeholder values; fill in the "
                          "scene's static lights"});
    }
    return issues;
}

}  // namespace osmeval
