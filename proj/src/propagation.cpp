#include "stirap/propagation.hpp"

#include "stirap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stirap {

namespace {

constexpr int kFields = 3;  // Omega_1 (= Omega_4), Omega_2, Omega_3
using Profiles = std::array<std::vector<double>, kFields>;

/// Medium state at one z on the tau samples: intensity corrections Omega^2 - Omega_in^2 and detuning drifts.
struct Slice {
    Profiles intensity;
    Profiles delta;
};

/// Field from input envelope and intensity correction; an untouched sample returns the envelope itself.
inline double field_value(double envelope, double correction) {
    if (correction == 0.0) return envelope;
    return std::sqrt(std::max(envelope * envelope + correction, 0.0));
}

/// Field index of transition k: the fourth transition reuses the first field.
constexpr int field_of(int k) { return k == 3 ? 0 : k; }

class MediumHamiltonian {
public:
    MediumHamiltonian(const MediumConfig& cfg, const std::vector<double>& tau, const Slice& slice)
        : kind_(cfg.scheme.kind()), tau_(tau), slice_(slice) {
        const auto& d = cfg.scheme.single_photon_detunings();
        std::copy(d.begin(), d.end(), base_.begin());
        for (int k = 0; k < 4; ++k) {
            env_[static_cast<std::size_t>(k)] = cfg.input.at(k);
            phases_[static_cast<std::size_t>(k)] = cfg.input.at(k).phase();
        }
    }

    void operator()(double t, Matrix& h) const {
        const std::size_t n = tau_.size();
        const double pos = (t - tau_.front()) / (tau_[1] - tau_.front());
        const auto j = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 2)));
        const double w = (t - tau_[j]) / (tau_[j + 1] - tau_[j]);
        auto lerp = [&](const std::vector<double>& v) { return v[j] + w * (v[j + 1] - v[j]); };

        std::array<double, 3> dom{}, ddel{};
        for (int f = 0; f < kFields; ++f) {
            dom[static_cast<std::size_t>(f)] = lerp(slice_.intensity[static_cast<std::size_t>(f)]);
            ddel[static_cast<std::size_t>(f)] = lerp(slice_.delta[static_cast<std::size_t>(f)]);
        }
        std::array<double, 4> rabi{};
        std::array<double, 4> sp{};
        for (int k = 0; k < 4; ++k) {
            const auto f = static_cast<std::size_t>(field_of(k));
            rabi[static_cast<std::size_t>(k)] = field_value(env_[static_cast<std::size_t>(k)].value(t), dom[f]);
            sp[static_cast<std::size_t>(k)] = base_[static_cast<std::size_t>(k)] + ddel[f];
        }
        const auto ladder = multiphoton_detunings(kind_, sp);
        fill_hamiltonian(ladder, rabi, phases_, h);
    }

private:
    SchemeKind kind_;
    std::array<double, 4> base_{};
    std::array<PulseEnvelope, 4> env_{};
    std::array<double, 4> phases_{};
    const std::vector<double>& tau_;
    const Slice& slice_;
};

std::vector<double> derivative(const std::vector<double>& f, const std::vector<double>& t) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    d[0] = (f[1] - f[0]) / (t[1] - t[0]);
    d[n - 1] = (f[n - 1] - f[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (t[j + 1] - t[j - 1]);
    return d;
}

class Marcher {
public:
    explicit Marcher(const MediumConfig& cfg) : cfg_(cfg) {
        const int n = cfg.tau.samples;
        tau_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            tau_[static_cast<std::size_t>(i)] =
                i + 1 == n ? cfg.tau.t_end
                           : cfg.tau.t_start + (cfg.tau.t_end - cfg.tau.t_start) * static_cast<double>(i) /
                                                   static_cast<double>(n - 1);
        double peak = 0.0;
        for (const auto& e : cfg.input.stored()) peak = std::max(peak, e.peak());
        floor_ = cfg.floor_fraction * peak;
        // Intensity error a field error of floor_ produces at peak amplitude.
        intensity_floor_ = 2.0 * floor_ * peak;
        for (int f = 0; f < kFields; ++f) {
            auto& v = input_[static_cast<std::size_t>(f)];
            v.resize(tau_.size());
            for (std::size_t j = 0; j < tau_.size(); ++j) v[j] = cfg.input.at(f).value(tau_[j]);
        }
    }

    const std::vector<double>& tau() const { return tau_; }
    double floor_omega() const { return floor_; }
    long clamped() const { return clamped_; }

    Slice zero_slice() const {
        Slice s;
        for (int f = 0; f < kFields; ++f) {
            s.intensity[static_cast<std::size_t>(f)].assign(tau_.size(), 0.0);
            s.delta[static_cast<std::size_t>(f)].assign(tau_.size(), 0.0);
        }
        return s;
    }

    Trajectory atoms(const Slice& s) const {
        const MediumHamiltonian h(cfg_, tau_, s);
        return integrate(HamiltonianFn(std::cref(h)), bare_state(5, cfg_.initial_level), cfg_.tau);
    }

    /// z-derivative of the slice given the atomic response to it.
    Slice rhs(const Slice& s, const Trajectory& traj) const {
        const std::size_t n = tau_.size();
        const double sign23 = cfg_.scheme.kind() == SchemeKind::ExtendedLambda5 ? -1.0 : 1.0;
        const auto& q = cfg_.q;

        std::array<std::vector<double>, 5> pop;
        std::array<std::vector<double>, 4> coh;
        for (auto& p : pop) p.resize(n);
        for (auto& c : coh) c.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const State& b = traj.states()[j];
            for (int i = 0; i < 5; ++i) pop[static_cast<std::size_t>(i)][j] = std::norm(b(i));
            for (int k = 0; k < 4; ++k) coh[static_cast<std::size_t>(k)][j] = std::real(std::conj(b(k)) * b(k + 1));
        }
        auto ratio = [&](int k, int divisor_field) {
            std::vector<double> r(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double div = field(s, divisor_field, j);
                r[j] = div > floor_ ? coh[static_cast<std::size_t>(k)][j] / div : 0.0;
            }
            return r;
        };
        auto sum = [&](int a, int b) {
            std::vector<double> r(n);
            for (std::size_t j = 0; j < n; ++j) r[j] = pop[static_cast<std::size_t>(a)][j] + pop[static_cast<std::size_t>(b)][j];
            return r;
        };
        const int div2 = cfg_.drift_divisor == DriftDivisor::Omega1 ? 0 : 1;
        const int div3 = cfg_.drift_divisor == DriftDivisor::Omega1 ? 0 : 2;

        const auto dp1 = derivative(pop[0], tau_);
        const auto dp5 = derivative(pop[4], tau_);
        const auto dp12 = derivative(sum(0, 1), tau_);
        const auto dp45 = derivative(sum(3, 4), tau_);
        const auto dr1 = derivative(ratio(0, 0), tau_);
        const auto dr4 = derivative(ratio(3, 0), tau_);
        const auto dr2 = derivative(ratio(1, div2), tau_);
        const auto dr3 = derivative(ratio(2, div3), tau_);

        Slice d = zero_slice();
        for (std::size_t j = 0; j < n; ++j) {
            d.intensity[0][j] = q[0] * dp1[j] + q[3] * dp5[j];
            d.intensity[1][j] = -sign23 * q[1] * dp12[j];
            d.intensity[2][j] = -sign23 * q[2] * dp45[j];
            d.delta[0][j] = q[0] * dr1[j] + q[3] * dr4[j];
            d.delta[1][j] = -sign23 * q[1] * dr2[j];
            d.delta[2][j] = -sign23 * q[2] * dr3[j];
        }
        return d;
    }

    /// Intensities may not drop below -intensity_floor_; smaller excursions are depletion and are clamped to zero.
    void regularize(Slice& s, double z) {
        for (int f = 0; f < kFields; ++f) {
            const auto& in = input_[static_cast<std::size_t>(f)];
            auto& corr = s.intensity[static_cast<std::size_t>(f)];
            for (std::size_t j = 0; j < tau_.size(); ++j) {
                const double v = in[j] * in[j] + corr[j];
                if (v >= 0.0) continue;
                if (v < -intensity_floor_) {
                    std::ostringstream os;
                    os << "intensity Omega_" << f + 1 << "^2 became negative (" << v << ") at z = " << z
                       << ", tau = " << tau_[j];
                    throw ResolutionError(os.str(), z);
                }
                corr[j] = -in[j] * in[j];
                ++clamped_;
            }
        }
    }

    double field(const Slice& s, int f, std::size_t j) const {
        return field_value(input_[static_cast<std::size_t>(f)][j], s.intensity[static_cast<std::size_t>(f)][j]);
    }

private:
    const MediumConfig& cfg_;
    std::vector<double> tau_;
    Profiles input_;
    double floor_ = 0.0;
    double intensity_floor_ = 0.0;
    long clamped_ = 0;
};

void axpy(Slice& y, double a, const Slice& x) {
    for (int f = 0; f < kFields; ++f) {
        auto& yo = y.intensity[static_cast<std::size_t>(f)];
        auto& yd = y.delta[static_cast<std::size_t>(f)];
        const auto& xo = x.intensity[static_cast<std::size_t>(f)];
        const auto& xd = x.delta[static_cast<std::size_t>(f)];
        for (std::size_t j = 0; j < yo.size(); ++j) {
            yo[j] += a * xo[j];
            yd[j] += a * xd[j];
        }
    }
}

void record(PropagationResult& r, const Marcher& m, const Slice& s, double z, const Trajectory& traj, int target) {
    r.z.push_back(z);
    std::array<std::vector<double>, 4> fields, drifts;
    for (int k = 0; k < 4; ++k) {
        const int f = field_of(k);
        auto& fo = fields[static_cast<std::size_t>(k)];
        fo.resize(m.tau().size());
        for (std::size_t j = 0; j < fo.size(); ++j) fo[j] = m.field(s, f, j);
        drifts[static_cast<std::size_t>(k)] = s.delta[static_cast<std::size_t>(f)];
    }
    r.fields.push_back(std::move(fields));
    r.drifts.push_back(std::move(drifts));
    r.exit_fidelity.push_back(final_fidelity(traj, target));
}

PropagationResult march(const MediumConfig& cfg) {
    Marcher m(cfg);
    PropagationResult r;
    r.tau = m.tau();
    r.floor_omega = m.floor_omega();

    const double dz = cfg.length / cfg.z_steps;
    Slice y = m.zero_slice();
    Trajectory traj = m.atoms(y);
    for (int step = 0; step < cfg.z_steps; ++step) {
        const double z = step * dz;
        record(r, m, y, z, traj, cfg.target_level);
        // Heun: Euler predictor, trapezoidal corrector.
        const Slice k1 = m.rhs(y, traj);
        Slice pred = y;
        axpy(pred, dz, k1);
        m.regularize(pred, z + dz);
        const Slice k2 = m.rhs(pred, m.atoms(pred));
        axpy(y, 0.5 * dz, k1);
        axpy(y, 0.5 * dz, k2);
        m.regularize(y, z + dz);
        traj = m.atoms(y);
    }
    record(r, m, y, cfg.length, traj, cfg.target_level);
    r.exit_trajectory = std::move(traj);
    r.clamped = m.clamped();
    return r;
}

}  // namespace

void MediumConfig::validate() const {
    for (double qi : q)
        if (!std::isfinite(qi) || qi < 0.0) throw InputError("medium: couplings q_i must be finite and >= 0");
    if (!std::isfinite(length) || length < 0.0) throw InputError("medium: length must be finite and >= 0");
    if (z_steps < 1) throw InputError("medium: z_steps must be >= 1");
    if (!scheme.is_five_level()) throw UnsupportedSchemeError("medium: propagation needs a five-level scheme");
    if (!input.tie_1_4()) throw InputError("medium: input pulses must tie Omega_4 to Omega_1");
    check_compatible(scheme, input);
    tau.validate();
    if (tau.samples < 3) throw InputError("medium: tau grid needs at least 3 samples");
    check_coverage(input, tau);
    if (initial_level < 1 || initial_level > 5 || target_level < 1 || target_level > 5)
        throw DimensionError("medium: levels must lie in 1..5");
    if (!(floor_fraction > 0.0 && floor_fraction < 1.0)) throw InputError("medium: floor_fraction must lie in (0, 1)");
    if (!(dz_tol > 0.0)) throw InputError("medium: dz_tol must be > 0");
}

double PropagationResult::max_abs_drift(std::size_t iz, int k) const {
    double m = 0.0;
    for (double v : drifts.at(iz).at(static_cast<std::size_t>(k))) m = std::max(m, std::abs(v));
    return m;
}

PropagationResult propagate_medium(const MediumConfig& cfg) {
    cfg.validate();
    PropagationResult r = march(cfg);

    if (cfg.verify_dz && cfg.length > 0.0) {
        MediumConfig fine = cfg;
        fine.z_steps = 2 * cfg.z_steps;
        fine.verify_dz = false;
        const PropagationResult f = march(fine);
        const auto a = r.exit_trajectory.populations(r.exit_trajectory.size() - 1);
        const auto b = f.exit_trajectory.populations(f.exit_trajectory.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i) r.dz_change = std::max(r.dz_change, std::abs(a[i] - b[i]));
        if (r.dz_change > cfg.dz_tol) {
            std::ostringstream os;
            os << "halving dz changed an exit population by " << r.dz_change << " (tol " << cfg.dz_tol << ")";
            throw ResolutionError(os.str(), cfg.length);
        }
    }

    double t_short = std::numeric_limits<double>::infinity();
    double omega1_peak = cfg.input.at(0).peak();
    for (const auto& e : cfg.input.stored())
        if (e.peak() > 0.0) t_short = std::min(t_short, e.width());
    const double delta = std::abs(cfg.scheme.single_photon_detunings().front());
    if (std::isfinite(t_short) && delta > 0.0) {
        r.single_atom = scan_sequence(cfg.scheme, cfg.input, cfg.tau.t_start, cfg.tau.t_end, 2001, t_short);
        if (omega1_peak > 0.0) {
            const auto medium = check_medium_five(cfg.q[0], cfg.length, delta, omega1_peak, t_short, 0.0, 0.0);
            const Criterion& c = medium.at("five_propagation");
            r.single_atom.criteria.push_back(c);
            r.single_atom.overall = r.single_atom.overall && c.pass;
        }
        for (const auto& c : r.single_atom.criteria)
            if (c.applicable && !c.advisory && !c.pass) {
                std::ostringstream os;
                os << "criterion " << c.name << " = " << c.value << " misses threshold " << c.threshold;
                r.warnings.push_back(os.str());
            }
    }
    return r;
}

double optical_length_indicator(double alpha0, double length, double gamma, double delta) {
    if (!std::isfinite(delta) || delta <= 0.0) throw InputError("optical length indicator: delta must be > 0");
    if (!std::isfinite(alpha0) || !std::isfinite(length) || !std::isfinite(gamma) || alpha0 < 0.0 || length < 0.0 ||
        gamma < 0.0)
        throw InputError("optical length indicator: alpha0, L and gamma must be finite and >= 0");
    return alpha0 * length * gamma / delta;
}

}  // namespace stirap
