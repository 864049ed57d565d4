#pragma once

#include "stirap/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace stirap {

/// Integration window and step control.
///
/// Non-adaptive grids march `steps` equal RK4 steps (rounded up to a whole number per output
/// interval) and, when `verify_halving` is set, repeat the run at half the step and raise
/// AccuracyError if any final population moves by more than `tol`.
/// Adaptive grids use step doubling with `tol` as the per-step bound on the largest amplitude error.
struct TimeGrid {
    double t_start = -10.0;
    double t_end = 10.0;
    int steps = 200000;
    bool adaptive = true;
    double tol = 1e-12;
    /// Uniformly spaced stored samples, endpoints included.
    int samples = 1000;
    bool verify_halving = true;

    void validate() const;
};

/// Window covering every nonzero envelope until it falls below `fraction` of its peak.
TimeGrid covering_grid(const PulseSet& pulses, double fraction = 1e-7);

/// Throws CoverageError unless each nonzero envelope is below fraction * peak at both ends of the grid
/// and centred inside it.
void check_coverage(const PulseSet& pulses, const TimeGrid& grid, double fraction = 1e-6);

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<double> times, std::vector<State> states);

    int dimension() const noexcept { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<State>& states() const noexcept { return states_; }
    const State& final_state() const;

    /// rho_jj at a stored sample; `level` is one-based.
    double population(std::size_t sample, int level) const;
    std::vector<double> populations(std::size_t sample) const;
    double norm(std::size_t sample) const;

    /// max over stored samples of | ||psi|| - 1 |.
    double max_norm_drift() const;

    // Diagnostics filled by the integrator.
    long internal_steps = 0;
    long rejected_steps = 0;
    /// Largest population of each level over every internal step (zero-based level index).
    std::vector<double> peak_populations;

private:
    void check_level(int level) const;

    std::vector<double> times_;
    std::vector<State> states_;
};

/// Writes h <- H(t). Implementations must not allocate when called in the integration loop.
using HamiltonianFn = std::function<void(double t, Matrix& h)>;

/// Evaluates H(t) of a scheme and pulse set with the ladder precomputed.
class ChainHamiltonian {
public:
    ChainHamiltonian(const LevelScheme& scheme, const PulseSet& pulses,
                     ResonancePolicy policy = ResonancePolicy::Unchecked);

    void operator()(double t, Matrix& h) const;
    int dimension() const noexcept { return static_cast<int>(ladder_.size()); }

private:
    std::vector<double> ladder_;
    PulseSet pulses_;
};

Trajectory integrate(const HamiltonianFn& hamiltonian, const State& initial, const TimeGrid& grid);
Trajectory integrate(const LevelScheme& scheme, const PulseSet& pulses, const State& initial, const TimeGrid& grid);
/// `initial_level` is one-based.
Trajectory integrate(const LevelScheme& scheme, const PulseSet& pulses, int initial_level, const TimeGrid& grid);

/// Propagates psi from t_from to t_to (either direction) with adaptive RK4 step doubling.
State evolve(const HamiltonianFn& hamiltonian, State psi, double t_from, double t_to, double tol = 1e-12);

/// Population of `target` (one-based) at the last sample.
double final_fidelity(const Trajectory& traj, int target);

/// Largest stored-sample population of `level` (one-based).
double transient_peak(const Trajectory& traj, int level);

/// CSV with header t,rho_1,...,rho_n,norm and 12 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace stirap
