#pragma once

#include "stirap/dynamics.hpp"
#include "stirap/gates.hpp"
#include "stirap/model.hpp"
#include "stirap/propagation.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace stirap {

/// Medium section of a scenario file; q_i may be given directly or as q1 L / Delta applied to all four.
struct MediumSection {
    std::optional<std::array<double, 4>> q;
    std::optional<double> q1l_over_delta;
    double length = 1.0;
    int z_steps = 20;
    double floor_fraction = 1e-6;
    DriftDivisor drift_divisor = DriftDivisor::Omega1;
    bool verify_dz = false;
    double dz_tol = 1e-4;
};

/// Explicit scheme + pulses for `simulate`.
struct SystemSection {
    LevelScheme scheme = LevelScheme::lambda3(50.0);
    PulseSet pulses;
    int initial_level = 1;
    std::optional<TimeGrid> grid;
};

/// Parsed scenario file. Unknown keys are rejected at every level and all numbers must be finite.
struct ScenarioFile {
    std::optional<SystemSection> system;
    GateParams gate;
    std::optional<GateKind> gate_kind;
    std::optional<std::string> gate_input;
    std::optional<MediumSection> medium;
    std::optional<std::string> out_dir;
};

ScenarioFile parse_scenario(const nlohmann::json& j);
ScenarioFile load_scenario(const std::string& path);

/// The resolved parameter set as JSON, for sidecars.
nlohmann::json to_json(const GateParams& p);
nlohmann::json to_json(const PulseEnvelope& e);
nlohmann::json to_json(const LevelScheme& s);
nlohmann::json to_json(const PulseSet& p);
nlohmann::json to_json(const TimeGrid& g);
nlohmann::json to_json(const AdiabaticityReport& r);

/// Builds the propagation config for a gate row from a medium section.
MediumConfig medium_for_gate(const GateScenario& scenario, const MediumSection& medium, double delta);

}  // namespace stirap
