#include "stirap/dynamics.hpp"

#include "stirap/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace stirap {

namespace {

// Accepts states carried over from a previous run, whose norm drifts by up to ~1e-10 per run.
constexpr double kNormTolerance = 1e-8;

const Complex kMinusI{0.0, -1.0};

double max_abs_diff(const State& a, const State& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// One classical RK4 step of dpsi/dt = -i H(t) psi, given H at the start, midpoint and end.
class Rk4 {
public:
    State step(const Matrix& h0, const Matrix& hm, const Matrix& h1, const State& psi, double dt) {
        k1_.noalias() = kMinusI * (h0 * psi);
        tmp_ = psi + (0.5 * dt) * k1_;
        k2_.noalias() = kMinusI * (hm * tmp_);
        tmp_ = psi + (0.5 * dt) * k2_;
        k3_.noalias() = kMinusI * (hm * tmp_);
        tmp_ = psi + dt * k3_;
        k4_.noalias() = kMinusI * (h1 * tmp_);
        return psi + (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    State k1_, k2_, k3_, k4_, tmp_;
};

void track_peaks(const State& psi, std::vector<double>& peaks) {
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        auto& p = peaks[static_cast<std::size_t>(i)];
        p = std::max(p, std::norm(psi(i)));
    }
}

struct MarchStats {
    long steps = 0;
    long rejected = 0;
};

/// Fixed-step march over [a, b] in m equal steps.
State march_fixed(const HamiltonianFn& hamiltonian, State psi, double a, double b, long m, Rk4& rk,
                  std::vector<double>& peaks, MarchStats& stats) {
    const double dt = (b - a) / static_cast<double>(m);
    Matrix h0, hm, h1;
    hamiltonian(a, h0);
    for (long j = 0; j < m; ++j) {
        const double t = a + static_cast<double>(j) * dt;
        const double t1 = (j + 1 == m) ? b : a + static_cast<double>(j + 1) * dt;
        hamiltonian(t + 0.5 * dt, hm);
        hamiltonian(t1, h1);
        psi = rk.step(h0, hm, h1, psi, dt);
        std::swap(h0, h1);
        track_peaks(psi, peaks);
    }
    stats.steps += m;
    return psi;
}

/// Step-doubling adaptive march over [a, b] (b < a allowed). `h` carries the proposed step magnitude
/// between calls.
State march_adaptive(const HamiltonianFn& hamiltonian, State psi, double a, double b, double tol, double& h,
                     Rk4& rk, std::vector<double>& peaks, MarchStats& stats) {
    const double dir = b >= a ? 1.0 : -1.0;
    const double span = std::abs(b - a);
    if (span == 0.0) return psi;
    Matrix h0, hq1, hm, hq3, h1;
    double t = a;
    hamiltonian(t, h0);
    double done = 0.0;
    while (done < span) {
        const bool last = done + h >= span;
        const double step = last ? span - done : h;
        const double dt = dir * step;
        const double t1 = last ? b : t + dt;
        hamiltonian(t + 0.25 * dt, hq1);
        hamiltonian(t + 0.5 * dt, hm);
        hamiltonian(t + 0.75 * dt, hq3);
        hamiltonian(t1, h1);
        const State full = rk.step(h0, hm, h1, psi, dt);
        const State mid = rk.step(h0, hq1, hm, psi, 0.5 * dt);
        const State two = rk.step(hm, hq3, h1, mid, 0.5 * dt);
        const double err = max_abs_diff(two, full) / 15.0;
        const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 4.0);
        if (err <= tol) {
            psi = two;
            t = t1;
            done = last ? span : done + step;
            std::swap(h0, h1);
            track_peaks(psi, peaks);
            ++stats.steps;
            if (!last) h = step * factor;
        } else {
            ++stats.rejected;
            h = step * factor;
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw AccuracyError("adaptive step underflow at t = " + std::to_string(t));
        }
    }
    return psi;
}

void check_initial(const State& initial, int dimension) {
    if (initial.size() != dimension)
        throw DimensionError("initial state has " + std::to_string(initial.size()) + " components, expected " +
                             std::to_string(dimension));
    if (std::abs(initial.norm() - 1.0) > kNormTolerance) throw InputError("initial state must be normalised");
}

struct RunResult {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> peaks;
    MarchStats stats;
};

RunResult run(const HamiltonianFn& hamiltonian, const State& initial, const TimeGrid& grid, long per_segment) {
    RunResult r;
    const int n = grid.samples;
    r.times.resize(static_cast<std::size_t>(n));
    r.states.reserve(static_cast<std::size_t>(n));
    r.peaks.assign(static_cast<std::size_t>(initial.size()), 0.0);
    for (int i = 0; i < n; ++i)
        r.times[static_cast<std::size_t>(i)] =
            i + 1 == n ? grid.t_end
                       : grid.t_start + (grid.t_end - grid.t_start) * static_cast<double>(i) / static_cast<double>(n - 1);
    Rk4 rk;
    State psi = initial;
    track_peaks(psi, r.peaks);
    r.states.push_back(psi);
    double h = (grid.t_end - grid.t_start) / 1.0e4;
    for (int i = 1; i < n; ++i) {
        const double a = r.times[static_cast<std::size_t>(i - 1)];
        const double b = r.times[static_cast<std::size_t>(i)];
        psi = grid.adaptive ? march_adaptive(hamiltonian, psi, a, b, grid.tol, h, rk, r.peaks, r.stats)
                            : march_fixed(hamiltonian, psi, a, b, per_segment, rk, r.peaks, r.stats);
        r.states.push_back(psi);
    }
    return r;
}

}  // namespace

void TimeGrid::validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
        throw InputError("time grid: t_end must exceed t_start");
    if (samples < 2) throw InputError("time grid: need at least 2 samples");
    if (!(tol > 0.0)) throw InputError("time grid: tol must be > 0");
    if (!adaptive && steps < 100) throw InputError("time grid: fixed grids need at least 100 steps");
}

TimeGrid covering_grid(const PulseSet& pulses, double fraction) {
    TimeGrid g;
    if (const auto s = pulses.support(fraction)) {
        g.t_start = s->first;
        g.t_end = s->second;
    }
    return g;
}

void check_coverage(const PulseSet& pulses, const TimeGrid& grid, double fraction) {
    for (const auto& e : pulses.stored()) {
        if (e.peak() <= 0.0) continue;
        const double limit = fraction * e.peak();
        if (e.center() < grid.t_start || e.center() > grid.t_end || e.value(grid.t_start) >= limit ||
            e.value(grid.t_end) >= limit) {
            std::ostringstream os;
            os << "time grid [" << grid.t_start << ", " << grid.t_end << "] does not cover the pulse centred at "
               << e.center() << " with width " << e.width();
            throw CoverageError(os.str());
        }
    }
}

Trajectory::Trajectory(std::vector<double> times, std::vector<State> states)
    : times_(std::move(times)), states_(std::move(states)) {
    if (times_.size() != states_.size()) throw InputError("trajectory: times and states differ in length");
}

const State& Trajectory::final_state() const {
    if (states_.empty()) throw InputError("trajectory is empty");
    return states_.back();
}

void Trajectory::check_level(int level) const {
    if (states_.empty()) throw InputError("trajectory is empty");
    if (level < 1 || level > dimension())
        throw DimensionError("level " + std::to_string(level) + " outside 1.." + std::to_string(dimension()));
}

double Trajectory::population(std::size_t sample, int level) const {
    check_level(level);
    return std::norm(states_.at(sample)(level - 1));
}

std::vector<double> Trajectory::populations(std::size_t sample) const {
    const auto& s = states_.at(sample);
    std::vector<double> p(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(s(i));
    return p;
}

double Trajectory::norm(std::size_t sample) const { return states_.at(sample).norm(); }

double Trajectory::max_norm_drift() const {
    double d = 0.0;
    for (const auto& s : states_) d = std::max(d, std::abs(s.norm() - 1.0));
    return d;
}

ChainHamiltonian::ChainHamiltonian(const LevelScheme& scheme, const PulseSet& pulses, ResonancePolicy policy)
    : ladder_(scheme.ladder()), pulses_(pulses) {
    check_compatible(scheme, pulses);
    if (policy == ResonancePolicy::RequireTwoPhotonResonance && !two_photon_resonant(scheme))
        throw ResonanceError("two-photon resonance (delta_2 = delta_4 = 0, delta_1 = delta_3) does not hold");
}

void ChainHamiltonian::operator()(double t, Matrix& h) const {
    std::array<double, kMaxLevels - 1> rabi{};
    std::array<double, kMaxLevels - 1> phases{};
    const auto m = ladder_.size() - 1;
    for (std::size_t k = 0; k < m; ++k) {
        const auto& e = pulses_.at(static_cast<int>(k));
        rabi[k] = e.value(t);
        phases[k] = e.phase();
    }
    fill_hamiltonian(ladder_, std::span(rabi).first(m), std::span(phases).first(m), h);
}

Trajectory integrate(const HamiltonianFn& hamiltonian, const State& initial, const TimeGrid& grid) {
    grid.validate();
    if (initial.size() < 1 || initial.size() > kMaxLevels) throw DimensionError("unsupported state dimension");
    if (std::abs(initial.norm() - 1.0) > kNormTolerance) throw InputError("initial state must be normalised");
    const long segments = grid.samples - 1;
    const long per_segment = std::max(1L, (static_cast<long>(grid.steps) + segments - 1) / segments);
    RunResult r = run(hamiltonian, initial, grid, per_segment);
    if (!grid.adaptive && grid.verify_halving) {
        const RunResult fine = run(hamiltonian, initial, grid, 2 * per_segment);
        const State& a = r.states.back();
        const State& b = fine.states.back();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(std::norm(a(i)) - std::norm(b(i))));
        if (worst > grid.tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "step halving changed a final population by %.3e (tol %.3e)", worst,
                          grid.tol);
            throw AccuracyError(buf);
        }
    }
    Trajectory traj(std::move(r.times), std::move(r.states));
    traj.internal_steps = r.stats.steps;
    traj.rejected_steps = r.stats.rejected;
    traj.peak_populations = std::move(r.peaks);
    return traj;
}

Trajectory integrate(const LevelScheme& scheme, const PulseSet& pulses, const State& initial, const TimeGrid& grid) {
    const ChainHamiltonian h(scheme, pulses);
    check_initial(initial, h.dimension());
    check_coverage(pulses, grid);
    return integrate(HamiltonianFn(std::cref(h)), initial, grid);
}

Trajectory integrate(const LevelScheme& scheme, const PulseSet& pulses, int initial_level, const TimeGrid& grid) {
    return integrate(scheme, pulses, bare_state(scheme.dimension(), initial_level), grid);
}

State evolve(const HamiltonianFn& hamiltonian, State psi, double t_from, double t_to, double tol) {
    if (!(tol > 0.0)) throw InputError("evolve: tol must be > 0");
    Rk4 rk;
    std::vector<double> peaks(static_cast<std::size_t>(psi.size()), 0.0);
    MarchStats stats;
    double h = std::abs(t_to - t_from) / 1.0e4;
    return march_adaptive(hamiltonian, std::move(psi), t_from, t_to, tol, h, rk, peaks, stats);
}

double final_fidelity(const Trajectory& traj, int target) { return traj.population(traj.size() - 1, target); }

double transient_peak(const Trajectory& traj, int level) {
    if (traj.empty()) throw InputError("trajectory is empty");
    double peak = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) peak = std::max(peak, traj.population(i, level));
    return peak;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    const int n = traj.dimension();
    for (int j = 1; j <= n; ++j) out += ",rho_" + std::to_string(j);
    out += ",norm\n";
    char buf[64];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", traj.times()[i]);
        out += buf;
        for (int j = 1; j <= n; ++j) {
            std::snprintf(buf, sizeof buf, ",%.12g", traj.population(i, j));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.12g\n", traj.norm(i));
        out += buf;
    }
    return out;
}

}  // namespace stirap
