#include "stirap/model.hpp"

#include "stirap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stirap {

PulseEnvelope::PulseEnvelope(double peak, double center, double width, double phase)
    : peak_(peak), center_(center), width_(width), phase_(phase) {
    if (!std::isfinite(peak) || !std::isfinite(center) || !std::isfinite(width) || !std::isfinite(phase))
        throw InputError("pulse envelope: non-finite parameter");
    if (peak < 0.0) throw InputError("pulse envelope: peak must be >= 0");
    if (width <= 0.0) throw InputError("pulse envelope: width must be > 0");
}

double PulseEnvelope::value(double t) const noexcept {
    const double x = (t - center_) / width_;
    return peak_ * std::exp(-x * x);
}

double PulseEnvelope::support_radius(double fraction) const {
    if (fraction <= 0.0 || fraction >= 1.0) throw InputError("support fraction must lie in (0, 1)");
    return width_ * std::sqrt(-std::log(fraction));
}

double envelope_value(const PulseEnvelope& p, double t) noexcept { return p.value(t); }

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::TwoLevel: return "two_level";
        case SchemeKind::Lambda3: return "lambda3";
        case SchemeKind::M5: return "m5";
        case SchemeKind::ExtendedLambda5: return "extended_lambda5";
    }
    return "unknown";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
    for (auto kind : {SchemeKind::TwoLevel, SchemeKind::Lambda3, SchemeKind::M5, SchemeKind::ExtendedLambda5})
        if (to_string(kind) == name) return kind;
    throw UnsupportedSchemeError("unknown scheme kind '" + std::string(name) + "'");
}

int dimension_of(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::TwoLevel: return 2;
        case SchemeKind::Lambda3: return 3;
        case SchemeKind::M5:
        case SchemeKind::ExtendedLambda5: return 5;
    }
    return 0;
}

LevelScheme::LevelScheme(SchemeKind kind, std::vector<double> deltas) : kind_(kind), deltas_(std::move(deltas)) {
    for (double d : deltas_)
        if (!std::isfinite(d)) throw InputError("level scheme: non-finite detuning");
}

LevelScheme LevelScheme::two_level(double delta) { return {SchemeKind::TwoLevel, {delta}}; }
LevelScheme LevelScheme::lambda3(double delta) { return {SchemeKind::Lambda3, {delta}}; }

LevelScheme LevelScheme::m5(const std::array<double, 4>& deltas) {
    return {SchemeKind::M5, {deltas.begin(), deltas.end()}};
}

LevelScheme LevelScheme::extended_lambda5(const std::array<double, 4>& deltas) {
    return {SchemeKind::ExtendedLambda5, {deltas.begin(), deltas.end()}};
}

LevelScheme LevelScheme::resonant_five(SchemeKind kind, double delta) {
    switch (kind) {
        case SchemeKind::M5: return m5({delta, delta, delta, delta});
        // Equal magnitudes, alternating signs.
        case SchemeKind::ExtendedLambda5: return extended_lambda5({delta, -delta, -delta, delta});
        default: throw UnsupportedSchemeError("resonant_five: scheme must be m5 or extended_lambda5");
    }
}

LevelScheme LevelScheme::make(SchemeKind kind, std::span<const double> deltas) {
    const std::size_t expected = (kind == SchemeKind::M5 || kind == SchemeKind::ExtendedLambda5) ? 4 : 1;
    if (deltas.size() != expected)
        throw InputError("scheme " + std::string(to_string(kind)) + " expects " + std::to_string(expected) +
                         " single-photon detuning(s), got " + std::to_string(deltas.size()));
    return {kind, {deltas.begin(), deltas.end()}};
}

std::vector<double> LevelScheme::ladder() const {
    switch (kind_) {
        case SchemeKind::TwoLevel: return {0.0, deltas_[0]};
        case SchemeKind::Lambda3: return {0.0, deltas_[0], 0.0};
        case SchemeKind::M5:
        case SchemeKind::ExtendedLambda5: {
            const auto d = multiphoton_detunings(*this);
            return {d.begin(), d.end()};
        }
    }
    return {};
}

std::array<double, 5> multiphoton_detunings(const LevelScheme& scheme) {
    const auto& d = scheme.single_photon_detunings();
    if (!scheme.is_five_level())
        throw UnsupportedSchemeError("multi-photon detunings are defined for five-level schemes only, got " +
                                     std::string(to_string(scheme.kind())));
    return multiphoton_detunings(scheme.kind(), {d[0], d[1], d[2], d[3]});
}

std::array<double, 5> multiphoton_detunings(SchemeKind kind, const std::array<double, 4>& d) {
    switch (kind) {
        case SchemeKind::M5:
            return {0.0, d[0], d[0] - d[1], d[2] + d[0] - d[1], d[3] - d[2] + d[1] - d[0]};
        case SchemeKind::ExtendedLambda5:
            return {0.0, d[0], d[0] + d[1], -d[2] + d[0] + d[1], -d[3] - d[2] + d[1] + d[0]};
        default:
            throw UnsupportedSchemeError("multi-photon detunings are defined for five-level schemes only, got " +
                                         std::string(to_string(kind)));
    }
}

bool two_photon_resonant(const LevelScheme& scheme, double rel_tol) {
    if (!scheme.is_five_level()) return true;
    const auto d = multiphoton_detunings(scheme);
    const double scale = std::max({1.0, std::abs(d[1]), std::abs(d[3])});
    return std::abs(d[2]) <= rel_tol * scale && std::abs(d[4]) <= rel_tol * scale &&
           std::abs(d[1] - d[3]) <= rel_tol * scale;
}

PulseSet PulseSet::two_level(const PulseEnvelope& omega1) {
    PulseSet s;
    s.envelopes_ = {omega1};
    return s;
}

PulseSet PulseSet::lambda3(const PulseEnvelope& pump, const PulseEnvelope& stokes) {
    PulseSet s;
    s.envelopes_ = {pump, stokes};
    return s;
}

PulseSet PulseSet::five(const PulseEnvelope& omega1, const PulseEnvelope& omega2, const PulseEnvelope& omega3,
                        const PulseEnvelope& omega4) {
    PulseSet s;
    s.envelopes_ = {omega1, omega2, omega3, omega4};
    return s;
}

PulseSet PulseSet::five_tied(const PulseEnvelope& omega1, const PulseEnvelope& omega2,
                             const PulseEnvelope& omega3) {
    PulseSet s;
    s.envelopes_ = {omega1, omega2, omega3};
    s.tie_1_4_ = true;
    return s;
}

int PulseSet::couplings() const noexcept {
    return static_cast<int>(envelopes_.size()) + (tie_1_4_ ? 1 : 0);
}

const PulseEnvelope& PulseSet::at(int k) const {
    if (k < 0 || k >= couplings()) throw DimensionError("pulse index out of range");
    if (tie_1_4_ && k == 3) return envelopes_[0];
    return envelopes_[static_cast<std::size_t>(k)];
}

void PulseSet::rabi_at(double t, std::span<double> out) const {
    const int n = couplings();
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = at(k).value(t);
}

PulseSet PulseSet::with_common_phase(double phase) const {
    PulseSet s = *this;
    for (auto& e : s.envelopes_) e = e.with_phase(e.phase() + phase);
    return s;
}

std::optional<std::pair<double, double>> PulseSet::support(double fraction) const {
    std::optional<std::pair<double, double>> span;
    for (const auto& e : envelopes_) {
        if (e.peak() <= 0.0) continue;
        const double r = e.support_radius(fraction);
        const std::pair<double, double> s{e.center() - r, e.center() + r};
        if (!span) {
            span = s;
        } else {
            span->first = std::min(span->first, s.first);
            span->second = std::max(span->second, s.second);
        }
    }
    return span;
}

PulseSet sp_pair(const PulseEnvelope& stokes, const PulseEnvelope& pump) {
    if (!(stokes.center() < pump.center()))
        throw SequenceOrderError("SP pair requires the Stokes pulse to be centred strictly before the pump");
    PulseSet s = PulseSet::lambda3(pump, stokes);
    s.order_ = PulseOrder::StokesFirst;
    return s;
}

void fill_hamiltonian(std::span<const double> ladder, std::span<const double> rabi, std::span<const double> phases,
                      Matrix& h) {
    const auto n = static_cast<Eigen::Index>(ladder.size());
    h.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = ladder[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const Complex c = -rabi[ks] * std::polar(1.0, phases[ks]);
        h(k, k + 1) = c;
        h(k + 1, k) = std::conj(c);
    }
}

Matrix assemble_hamiltonian(std::span<const double> ladder, std::span<const double> rabi,
                            std::span<const double> phases) {
    if (ladder.empty() || ladder.size() > kMaxLevels || rabi.size() + 1 != ladder.size() ||
        phases.size() != rabi.size())
        throw DimensionError("assemble_hamiltonian: need n-1 couplings for an n-level chain");
    Matrix h;
    fill_hamiltonian(ladder, rabi, phases, h);
    return h;
}

void check_compatible(const LevelScheme& scheme, const PulseSet& pulses) {
    if (pulses.couplings() != scheme.couplings())
        throw DimensionError("scheme " + std::string(to_string(scheme.kind())) + " has " +
                             std::to_string(scheme.couplings()) + " transitions but the pulse set drives " +
                             std::to_string(pulses.couplings()));
    if (pulses.tie_1_4() && !scheme.is_five_level())
        throw DimensionError("tie_1_4 only applies to five-level schemes");
}

HamiltonianSample build_hamiltonian(const LevelScheme& scheme, const PulseSet& pulses, double t,
                                    ResonancePolicy policy) {
    check_compatible(scheme, pulses);
    if (policy == ResonancePolicy::RequireTwoPhotonResonance && !two_photon_resonant(scheme))
        throw ResonanceError("two-photon resonance (delta_2 = delta_4 = 0, delta_1 = delta_3) does not hold");
    const auto ladder = scheme.ladder();
    std::array<double, kMaxLevels - 1> rabi{};
    std::array<double, kMaxLevels - 1> phases{};
    const auto m = static_cast<std::size_t>(pulses.couplings());
    for (std::size_t k = 0; k < m; ++k) {
        const auto& e = pulses.at(static_cast<int>(k));
        rabi[k] = e.value(t);
        phases[k] = e.phase();
    }
    return {assemble_hamiltonian(ladder, std::span(rabi).first(m), std::span(phases).first(m)), t};
}

State bare_state(int dimension, int level) {
    if (dimension < 1 || dimension > kMaxLevels) throw DimensionError("bare_state: unsupported dimension");
    if (level < 1 || level > dimension)
        throw DimensionError("bare_state: level " + std::to_string(level) + " outside 1.." +
                             std::to_string(dimension));
    State s = State::Zero(dimension);
    s(level - 1) = 1.0;
    return s;
}

}  // namespace stirap
