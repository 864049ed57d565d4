#include "stirap/adiabaticity.hpp"

#include "stirap/dressed.hpp"
#include "stirap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stirap {

namespace {

Criterion make(std::string name, std::string formula, double value, Relation rel, const Thresholds& th,
               bool applicable = true, bool advisory = false) {
    Criterion c;
    c.name = std::move(name);
    c.formula_id = std::move(formula);
    c.value = value;
    c.relation = rel;
    c.applicable = applicable;
    c.advisory = advisory;
    switch (rel) {
        case Relation::MuchGreater:
            c.threshold = th.much_greater;
            c.pass = value >= th.much_greater;
            break;
        case Relation::MuchLess:
            c.threshold = th.much_less;
            c.pass = value <= th.much_less;
            break;
        case Relation::Indicator:
            c.threshold = th.indicator_limit;
            c.pass = value <= th.indicator_limit;
            break;
    }
    if (!applicable) c.pass = true;
    return c;
}

AdiabaticityReport finish(std::vector<Criterion> criteria) {
    AdiabaticityReport r;
    r.criteria = std::move(criteria);
    r.overall = std::all_of(r.criteria.begin(), r.criteria.end(),
                            [](const Criterion& c) { return c.advisory || !c.applicable || c.pass; });
    return r;
}

void require(bool ok, const char* what) {
    if (!ok) throw InputError(what);
}

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

AdiabaticityReport check_two_level(double delta, double t_short, const Thresholds& th) {
    return finish({make("delta_t", "two_level.detuning_bandwidth", std::abs(delta) * t_short, Relation::MuchGreater,
                        th)});
}

}  // namespace

const Criterion& AdiabaticityReport::at(const std::string& name) const {
    for (const auto& c : criteria)
        if (c.name == name) return c;
    throw InputError("no criterion named '" + name + "'");
}

bool AdiabaticityReport::has(const std::string& name) const {
    return std::any_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == name; });
}

double AdiabaticityReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : criteria) {
        if (c.advisory || !c.applicable) continue;
        if (c.relation == Relation::MuchGreater)
            m = std::min(m, c.value / c.threshold);
        else
            m = std::min(m, c.value == 0.0 ? std::numeric_limits<double>::infinity() : c.threshold / c.value);
    }
    return m;
}

double AdiabaticityReport::min_much_greater_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : criteria)
        if (!c.advisory && c.applicable && c.relation == Relation::MuchGreater) m = std::min(m, c.value);
    return m;
}

AdiabaticityReport check_lambda3(double omega_peak, double delta, double t_pulse, const Thresholds& th) {
    require(finite_all({omega_peak, delta, t_pulse}), "check_lambda3: non-finite input");
    require(omega_peak >= 0.0 && delta > 0.0 && t_pulse > 0.0,
            "check_lambda3: need omega >= 0, delta > 0 and t_pulse > 0");
    return finish({
        make("omega_sq_t_over_delta", "lambda.raman_adiabaticity", std::abs(omega_peak * omega_peak * t_pulse / delta),
             Relation::MuchGreater, th),
        make("delta_t", "two_level.detuning_bandwidth", delta * t_pulse, Relation::MuchGreater, th),
    });
}

AdiabaticityReport check_lambda3_medium(double q, double length, double omega_peak, double delta, double t_pulse,
                                        const Thresholds& th) {
    require(finite_all({q, length, omega_peak, delta, t_pulse}), "check_lambda3_medium: non-finite input");
    require(q >= 0.0 && length >= 0.0, "check_lambda3_medium: q and L must be >= 0");
    require(omega_peak > 0.0 && delta > 0.0 && t_pulse > 0.0,
            "check_lambda3_medium: omega, delta and t_pulse must be > 0");
    const double ql = q * length;
    return finish({
        make("ql_over_omega_sq_t", "lambda.medium_rabi", ql / (omega_peak * omega_peak * t_pulse), Relation::MuchLess,
             th),
        make("ql_over_delta_sq_t", "lambda.medium_detuning", ql / (delta * delta * t_pulse), Relation::MuchLess, th),
    });
}

AdiabaticityReport check_five(double omega1, double omega2, double omega3, double delta, double t_short,
                              const Thresholds& th) {
    require(finite_all({omega1, omega2, omega3, delta, t_short}), "check_five: non-finite input");
    require(omega1 >= 0.0 && omega2 >= 0.0 && omega3 >= 0.0, "check_five: Rabi frequencies must be >= 0");
    require(delta >= 0.0 && t_short > 0.0, "check_five: need delta >= 0 and t_short > 0");
    const double o1sq = omega1 * omega1;
    const double osq = omega2 * omega2 + omega3 * omega3;
    // x_2 = Omega_1^2 + Omega_2^2 + Omega_3^2 for the tied chain, the same value the closed-form
    // eigenvalues use.
    const double x2 = o1sq + osq;
    const double d2 = delta * delta;
    const bool overlap = osq > 0.0;
    const bool has_delta = delta > 0.0;
    return finish({
        make("delta_t", "five.detuning_bandwidth", delta * t_short, Relation::MuchGreater, th),
        make("pair_gap", "five.three_level_gap", osq * t_short / std::sqrt(d2 + 4.0 * x2), Relation::MuchGreater, th,
             overlap),
        make("split_gap", "five.two_level_split", std::sqrt(d2 + 4.0 * o1sq) * t_short, Relation::MuchGreater, th),
        make("x1_gap", "five.omega1_gap", o1sq * t_short / std::sqrt(d2 + 4.0 * o1sq), Relation::MuchGreater, th,
             omega1 > 0.0),
        make("x2_gap", "five.total_gap", x2 > 0.0 ? x2 * t_short / std::sqrt(d2 + 4.0 * x2) : 0.0,
             Relation::MuchGreater, th, x2 > 0.0),
        make("large_detuning_pair", "five.large_detuning.three_level", has_delta ? osq * t_short / delta : 0.0,
             Relation::MuchGreater, th, overlap && has_delta, true),
        make("large_detuning_omega1", "five.large_detuning.omega1", has_delta ? o1sq * t_short / delta : 0.0,
             Relation::MuchGreater, th, overlap && has_delta, true),
    });
}

AdiabaticityReport check_five_general(double omega1, double omega2, double omega3, double omega4, double delta,
                                      double t_short, const Thresholds& th) {
    require(finite_all({omega1, omega2, omega3, omega4, delta, t_short}), "check_five_general: non-finite input");
    require(omega1 >= 0.0 && omega2 >= 0.0 && omega3 >= 0.0 && omega4 >= 0.0,
            "check_five_general: Rabi frequencies must be >= 0");
    require(delta >= 0.0 && t_short > 0.0, "check_five_general: need delta >= 0 and t_short > 0");
    const auto s = five_eigenvalues_general(omega1, omega2, omega3, omega4, delta);
    const double d2 = delta * delta;
    // The x_2 denominator is taken as sqrt(Delta^2 + 4 x_2), dimensionally matching its siblings.
    return finish({
        make("delta_t", "five.detuning_bandwidth", delta * t_short, Relation::MuchGreater, th),
        make("pair_gap", "five.three_level_gap", (s.x2 - s.x1) * t_short / std::sqrt(d2 + 4.0 * s.x2),
             Relation::MuchGreater, th, s.x2 > s.x1),
        make("split_gap", "five.two_level_split", std::sqrt(d2 + 4.0 * s.x1) * t_short, Relation::MuchGreater, th),
        make("x1_gap", "five.omega1_gap", s.x1 * t_short / std::sqrt(d2 + 4.0 * s.x1), Relation::MuchGreater, th,
             s.v4 > 0.0),
        make("x2_gap", "five.total_gap", s.x2 > 0.0 ? s.x2 * t_short / std::sqrt(d2 + 4.0 * s.x2) : 0.0,
             Relation::MuchGreater, th, s.x2 > 0.0),
    });
}

AdiabaticityReport check_medium_five(double q1, double length, double delta, double omega1_peak, double t_pulse,
                                     double gamma, double alpha0, const Thresholds& th) {
    require(finite_all({q1, length, delta, omega1_peak, t_pulse, gamma, alpha0}),
            "check_medium_five: non-finite input");
    require(q1 >= 0.0 && length >= 0.0 && gamma >= 0.0 && alpha0 >= 0.0,
            "check_medium_five: q1, L, gamma and alpha0 must be >= 0");
    require(delta > 0.0 && omega1_peak > 0.0 && t_pulse > 0.0,
            "check_medium_five: delta, omega1 and t_pulse must be > 0");
    const double ql_over_delta = q1 * length / delta;
    return finish({
        make("five_propagation", "medium.five_propagation",
             ql_over_delta * (delta / (omega1_peak * omega1_peak * t_pulse)), Relation::MuchLess, th),
        make("optical_length", "medium.optical_length", alpha0 * length * gamma / delta, Relation::Indicator, th, true,
             true),
    });
}

AdiabaticityReport scan_sequence(const LevelScheme& scheme, const PulseSet& pulses, double t_start, double t_end,
                                 int samples, double t_short, double window_fraction, const Thresholds& th) {
    check_compatible(scheme, pulses);
    require(samples >= 2 && t_end > t_start, "scan_sequence: need t_end > t_start and >= 2 samples");
    require(window_fraction > 0.0 && window_fraction < 1.0, "scan_sequence: window fraction must lie in (0, 1)");

    const double delta = scheme.single_photon_detunings().front();
    const int m = pulses.couplings();
    auto inside_window = [&](double t) {
        bool any = false;
        for (const auto& e : pulses.stored()) {
            if (e.peak() <= 0.0) continue;
            any = true;
            if (e.value(t) < window_fraction * e.peak()) return false;
        }
        return any;
    };
    auto report_at = [&](double t) {
        std::array<double, kMaxLevels - 1> rabi{};
        pulses.rabi_at(t, std::span(rabi).first(static_cast<std::size_t>(m)));
        switch (scheme.kind()) {
            case SchemeKind::TwoLevel: return check_two_level(delta, t_short, th);
            case SchemeKind::Lambda3: return check_lambda3(std::hypot(rabi[0], rabi[1]), delta, t_short, th);
            case SchemeKind::M5:
            case SchemeKind::ExtendedLambda5:
                if (!two_photon_resonant(scheme))
                    throw ResonanceError("scan_sequence: five-level criteria assume two-photon resonance");
                return pulses.tie_1_4() ? check_five(rabi[0], rabi[1], rabi[2], std::abs(delta), t_short, th)
                                        : check_five_general(rabi[0], rabi[1], rabi[2], rabi[3], std::abs(delta),
                                                             t_short, th);
        }
        throw UnsupportedSchemeError("scan_sequence: unsupported scheme");
    };

    std::optional<AdiabaticityReport> worst;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = t_start + (t_end - t_start) * i / (samples - 1);
        if (!inside_window(t)) continue;
        auto r = report_at(t);
        const double margin = r.min_margin();
        if (!worst || margin < worst_margin) {
            worst_margin = margin;
            r.time = t;
            worst = std::move(r);
        }
    }
    if (!worst) {
        // No field on: only the field-independent criteria remain meaningful.
        auto r = scheme.kind() == SchemeKind::Lambda3 ? check_two_level(delta, t_short, th) : report_at(t_start);
        r.time = t_start;
        return r;
    }
    return *worst;
}

GapProbe minimum_gap(const LevelScheme& scheme, const PulseSet& pulses, double t_start, double t_end, int samples,
                     double t_short) {
    check_compatible(scheme, pulses);
    if (!scheme.is_five_level() || !two_photon_resonant(scheme))
        throw UnsupportedSchemeError("minimum_gap: needs a resonant five-level scheme");
    require(samples >= 2 && t_end > t_start && t_short > 0.0, "minimum_gap: invalid window");
    const double delta = multiphoton_detunings(scheme)[1];
    GapProbe probe{std::numeric_limits<double>::infinity(), t_start};
    std::array<double, 4> rabi{};
    for (int i = 0; i < samples; ++i) {
        const double t = t_start + (t_end - t_start) * i / (samples - 1);
        pulses.rabi_at(t, rabi);
        const auto s = five_eigenvalues_general(rabi[0], rabi[1], rabi[2], rabi[3], delta);
        for (std::size_t k = 0; k + 1 < s.lambdas.size(); ++k) {
            const double gap = (s.lambdas[k + 1] - s.lambdas[k]) * t_short;
            if (gap < probe.min_gap_t) probe = {gap, t};
        }
    }
    return probe;
}

}  // namespace stirap
