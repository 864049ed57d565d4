#pragma once

#include "stirap/adiabaticity.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace stirap {

/// Which field divides Re(b_k* b_{k+1}) in the Delta_2 and Delta_3 drift equations.
enum class DriftDivisor { Omega1, OwnField };

/// One-dimensional medium of tied five-level atoms (Omega_4 = Omega_1 is the same field).
///
/// The field equations advance intensities Omega_i^2; fields and detunings are stored on the tau samples
/// of `tau` as corrections to the input pulses and interpolated linearly in between, so a medium with all
/// q_i = 0 evaluates exactly the vacuum Hamiltonian.
struct MediumConfig {
    /// q_1..q_4 in units of 1 / (T * length).
    std::array<double, 4> q{};
    double length = 1.0;
    int z_steps = 20;
    LevelScheme scheme = LevelScheme::resonant_five(SchemeKind::M5, 50.0);
    PulseSet input;
    TimeGrid tau;
    int initial_level = 1;
    int target_level = 5;
    /// Relative to the largest input peak.
    double floor_fraction = 1e-6;
    DriftDivisor drift_divisor = DriftDivisor::Omega1;
    /// Repeat the march with half the z step and require exit populations to agree within this bound.
    bool verify_dz = false;
    double dz_tol = 1e-4;

    void validate() const;
};

struct PropagationResult {
    std::vector<double> z;
    std::vector<double> tau;
    /// fields[iz][k][j] = Omega_{k+1}(z_iz, tau_j), k = 0..3.
    std::vector<std::array<std::vector<double>, 4>> fields;
    /// drifts[iz][k][j] = change of Delta_{k+1} at (z_iz, tau_j) relative to the input detuning.
    std::vector<std::array<std::vector<double>, 4>> drifts;
    /// Population of the target level at the end of the tau window, per z sample.
    std::vector<double> exit_fidelity;
    /// Atomic evolution at the exit face.
    Trajectory exit_trajectory;
    double floor_omega = 0.0;
    /// Samples whose intensity was clamped to zero (depleted wings).
    long clamped = 0;
    /// Largest exit-population change under dz halving (when verified).
    double dz_change = 0.0;
    AdiabaticityReport single_atom;
    std::vector<std::string> warnings;

    double vacuum_fidelity() const { return exit_fidelity.front(); }
    double final_fidelity() const { return exit_fidelity.back(); }
    /// max over tau of |Delta_k drift| at z sample iz.
    double max_abs_drift(std::size_t iz, int k) const;
};

PropagationResult propagate_medium(const MediumConfig& cfg);

/// alpha0 * L * Gamma / Delta.
double optical_length_indicator(double alpha0, double length, double gamma, double delta);

}  // namespace stirap
