#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace osmeval {

/// The five sequence variants a scene can be captured under.
enum class ConditionKind {
    Baseline,
    NominalLights,
    CameraLight,
    DynamicLights,
    Velocity,
};

inline constexpr std::array<ConditionKind, 5> kAllConditions = {
    ConditionKind::Baseline,      ConditionKind::NominalLights, ConditionKind::CameraLight,
    ConditionKind::DynamicLights, ConditionKind::Velocity,
};

constexpr std::string_view condition_name(ConditionKind kind) {
    switch (kind) {
        case ConditionKind::Baseline: return "baseline";
        case ConditionKind::NominalLights: return "nominal_lights";
        case ConditionKind::CameraLight: return "camera_light";
        case ConditionKind::DynamicLights: return "dynamic_lights";
        case ConditionKind::Velocity: return "velocity";
    }
    return "baseline";
}

constexpr std::optional<ConditionKind> condition_from_name(std::string_view name) {
    for (ConditionKind kind : kAllConditions) {
        if (condition_name(kind) == name) return kind;
    }
    return std::nullopt;
}

}  // namespace osmeval
