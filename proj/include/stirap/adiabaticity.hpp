#pragma once

#include "stirap/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stirap {

/// How a dimensionless criterion value is judged.
enum class Relation {
    MuchGreater,  ///< value >= much_greater threshold
    MuchLess,     ///< value <= much_less threshold
    Indicator,    ///< order-of-unity indicator; passes while value <= indicator_limit
};

struct Thresholds {
    double much_greater = 10.0;
    double much_less = 0.1;
    double indicator_limit = 1.0;
};

struct Criterion {
    std::string name;
    std::string formula_id;
    double value = 0.0;
    double threshold = 0.0;
    Relation relation = Relation::MuchGreater;
    /// False when the inequality does not constrain the current field configuration.
    bool applicable = true;
    /// Reported only; does not enter AdiabaticityReport::overall.
    bool advisory = false;
    bool pass = false;
};

struct AdiabaticityReport {
    std::vector<Criterion> criteria;
    bool overall = true;
    /// Instant at which a sequence scan evaluated the criteria.
    std::optional<double> time;

    const Criterion& at(const std::string& name) const;
    bool has(const std::string& name) const;
    /// Smallest value / threshold (or threshold / value for MuchLess) over binding criteria.
    double min_margin() const;
    /// Smallest value among binding MuchGreater criteria (+inf if none).
    double min_much_greater_value() const;
};

/// Field strength and detuning against the Fourier width 1/T for the resonant Lambda system.
AdiabaticityReport check_lambda3(double omega_peak, double delta, double t_pulse, const Thresholds& th = {});

/// Propagation in a medium of length L with coupling q.
AdiabaticityReport check_lambda3_medium(double q, double length, double omega_peak, double delta, double t_pulse,
                                        const Thresholds& th = {});

/// Tied five-level chain (Omega_4 = Omega_1): full dressed-gap forms plus their large-detuning limits.
AdiabaticityReport check_five(double omega1, double omega2, double omega3, double delta, double t_short,
                              const Thresholds& th = {});

/// Resonant five-level chain with four independent fields.
AdiabaticityReport check_five_general(double omega1, double omega2, double omega3, double omega4, double delta,
                                      double t_short, const Thresholds& th = {});

/// Five-level propagation restriction and the optical-length indicator alpha0 L Gamma / Delta.
AdiabaticityReport check_medium_five(double q1, double length, double delta, double omega1_peak, double t_pulse,
                                     double gamma, double alpha0, const Thresholds& th = {});

/// Evaluates the scheme's criteria at every sample of [t_start, t_end] inside the window where each
/// switched-on pulse exceeds `window_fraction` of its peak, and returns the report at the instant of
/// minimum margin.
AdiabaticityReport scan_sequence(const LevelScheme& scheme, const PulseSet& pulses, double t_start, double t_end,
                                 int samples, double t_short, double window_fraction = 0.1,
                                 const Thresholds& th = {});

struct GapProbe {
    /// min over samples and pairs i != j of |Lambda_i - Lambda_j| * T.
    double min_gap_t = 0.0;
    double time = 0.0;
};

/// Closed-form minimum pairwise dressed-energy gap of a resonant five-level chain over a time window.
GapProbe minimum_gap(const LevelScheme& scheme, const PulseSet& pulses, double t_start, double t_end, int samples,
                     double t_short);

}  // namespace stirap
