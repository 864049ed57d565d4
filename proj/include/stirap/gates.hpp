#pragma once

#include "stirap/adiabaticity.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stirap {

enum class GateKind { Toffoli3, Toffoli4 };

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);
/// Number of control bits (2 or 3).
int control_count(GateKind kind);

/// Physical configuration shared by every row of a truth table; only on/off of each field changes.
///
/// Toffoli3: Stokes at -separation/2 and pump at +separation/2, both short.
/// Toffoli4: Omega_3 at -separation/2, Omega_2 at +separation/2, both nested inside the long
/// Omega_1 = Omega_4 pulse centred at long_center.
struct GateParams {
    double delta = 50.0;
    double peak = 100.0;
    double long_peak = 100.0;
    double short_width = 1.0;
    double long_width = 4.0;
    double separation = 1.5;
    double long_center = 0.0;
    SchemeKind five_scheme = SchemeKind::M5;
    double threshold = 0.99;
    double tol = 1e-12;
    int samples = 1000;

    void validate() const;
};

struct GateInput {
    std::vector<int> controls;
    int target = 0;

    /// Parses "110" / "1110": control bits followed by the target bit.
    static GateInput parse(std::string_view bits);
    std::string to_string() const;
};

/// Target bit the ideal gate produces: flipped iff every control is 1.
int toffoli_target(const GateInput& input);

struct GateScenario {
    GateKind kind = GateKind::Toffoli3;
    GateInput input;
    LevelScheme scheme = LevelScheme::lambda3(0.0);
    PulseSet pulses;
    /// One-based bare levels encoding target 0 and target 1.
    int level_zero = 1;
    int level_one = 3;
    int initial_level = 1;
    TimeGrid grid;
};

GateScenario encode(GateKind kind, const GateInput& input, const GateParams& params = {});

/// The all-fields-on configuration, used for adiabaticity diagnostics and grid sizing.
GateScenario nominal_scenario(GateKind kind, const GateParams& params = {});

struct ReadoutResult {
    std::optional<int> bit;
    double p_zero = 0.0;
    double p_one = 0.0;
    double leakage = 0.0;
};

/// Bit b when the population of logical state b is >= threshold and leakage <= 1 - threshold;
/// otherwise indeterminate.
ReadoutResult readout(const State& final_state, GateKind kind, double threshold = 0.99);

struct GateOutcome {
    GateInput input;
    std::vector<int> output_controls;
    int expected_target = 0;
    std::optional<int> output_target;
    /// Population of the logical state the ideal gate produces.
    double fidelity = 0.0;
    double leakage = 0.0;
    /// Population of the other logical state.
    double opposite = 0.0;
    Trajectory trajectory;

    bool correct(double threshold) const;
};

/// Evolves an arbitrary initial amplitude vector through the scenario's pulses.
Trajectory apply_gate(const GateScenario& scenario, const State& initial);

GateOutcome run_gate(GateKind kind, const GateInput& input, const GateParams& params = {});
GateOutcome run_gate(const GateScenario& scenario, double threshold);

struct TruthTable {
    GateKind kind = GateKind::Toffoli3;
    double threshold = 0.99;
    std::vector<GateOutcome> rows;
    std::vector<std::size_t> failed_rows;
    bool pass = false;
    AdiabaticityReport adiabaticity;
    std::vector<std::string> warnings;
};

/// Runs all 2^n inputs in row order 00..0 to 11..1, optionally in parallel.
TruthTable truth_table(GateKind kind, const GateParams& params = {}, unsigned workers = 0);

/// Criteria of the nominal sequence at its worst instant.
AdiabaticityReport gate_adiabaticity(GateKind kind, const GateParams& params = {});

}  // namespace stirap
