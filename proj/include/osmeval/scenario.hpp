#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "osmeval/condition.hpp"
#include "osmeval/manifest.hpp"

namespace osmeval {

enum class LightKind { Point, Directional };
enum class LightAttach { World, Camera };

struct LightSpec {
    LightKind kind = LightKind::Point;
    LightAttach attached_to = LightAttach::World;
    double intensity = 1.0;
    /// Position for point lights, direction for directional lights.
    std::array<double, 3> position_or_direction = {0.0, 0.0, 0.0};
};

struct LightScheduleEntry {
    int waypoint_index = 0;
    std::vector<LightSpec> lights;
};

/// Simulator-consumable description of one test condition. The dialect is
/// deliberately simulator-neutral; see README for the mapping notes.
struct ConditionConfig {
    ConditionKind condition = ConditionKind::Baseline;
    std::vector<LightSpec> light_setup;
    std::vector<LightScheduleEntry> light_schedule;
    double linear_velocity_mps = 0.75;
    double angular_velocity_radps = 0.8;
    /// True while light_setup still holds emitted placeholder values the
    /// user is expected to replace with their scene's static lights.
    bool light_setup_placeholder = false;
};

/// Defaults shared by all conditions (nominal velocities, no lights).
ConditionConfig default_condition_base();

/// Produce the configuration document for one condition kind. Pure and
/// total over the five kinds.
ConditionConfig emit_condition_config(ConditionKind kind,
                                      const ConditionConfig& base = default_condition_base());

nlohmann::json condition_config_to_json(const ConditionConfig& config);
ConditionConfig condition_config_from_json(const nlohmann::json& doc, const std::string& context);

ConditionConfig load_condition_config(const std::filesystem::path& path);
void save_condition_config(const std::filesystem::path& path, const ConditionConfig& config);

/// Non-fatal findings (currently: baseline placeholder lights left unfilled).
std::vector<Issue> validate_condition_config(const ConditionConfig& config);

}  // namespace osmeval
