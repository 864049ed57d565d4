#include "stirap/gates.hpp"

#include "stirap/errors.hpp"
#include "stirap/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace stirap {

unsigned default_workers() {
    if (const char* env = std::getenv("STIRAP_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::string_view to_string(GateKind kind) { return kind == GateKind::Toffoli3 ? "toffoli3" : "toffoli4"; }

GateKind gate_kind_from_string(std::string_view name) {
    if (name == "toffoli3") return GateKind::Toffoli3;
    if (name == "toffoli4") return GateKind::Toffoli4;
    throw InputError("unknown gate kind '" + std::string(name) + "' (expected toffoli3 or toffoli4)");
}

int control_count(GateKind kind) { return kind == GateKind::Toffoli3 ? 2 : 3; }

void GateParams::validate() const {
    auto finite_positive = [](double v, const char* what) {
        if (!std::isfinite(v) || v <= 0.0) throw InputError(std::string("gate params: ") + what + " must be > 0");
    };
    finite_positive(delta, "delta");
    finite_positive(peak, "peak");
    finite_positive(long_peak, "long_peak");
    finite_positive(short_width, "short_width");
    finite_positive(long_width, "long_width");
    finite_positive(separation, "separation");
    finite_positive(tol, "tol");
    if (!std::isfinite(long_center)) throw InputError("gate params: long_center must be finite");
    if (!(threshold > 0.5 && threshold <= 1.0)) throw InputError("gate params: threshold must lie in (0.5, 1]");
    if (samples < 2) throw InputError("gate params: samples must be >= 2");
    if (dimension_of(five_scheme) != 5) throw UnsupportedSchemeError("gate params: five_scheme must be five-level");
}

GateInput GateInput::parse(std::string_view bits) {
    if (bits.size() < 2) throw InputError("gate input needs control bits and a target bit");
    GateInput in;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw InputError("gate input '" + std::string(bits) + "' must contain only 0 and 1");
        const int b = bits[i] - '0';
        if (i + 1 == bits.size())
            in.target = b;
        else
            in.controls.push_back(b);
    }
    return in;
}

std::string GateInput::to_string() const {
    std::string s;
    for (int c : controls) s += static_cast<char>('0' + c);
    s += static_cast<char>('0' + target);
    return s;
}

int toffoli_target(const GateInput& input) {
    for (int c : input.controls)
        if (c == 0) return input.target;
    return 1 - input.target;
}

namespace {

void check_input(GateKind kind, const GateInput& input) {
    if (static_cast<int>(input.controls.size()) != control_count(kind))
        throw DimensionError(std::string(to_string(kind)) + " expects " + std::to_string(control_count(kind)) +
                             " control bits, got " + std::to_string(input.controls.size()));
    for (int c : input.controls)
        if (c != 0 && c != 1) throw InputError("control bits must be 0 or 1");
    if (input.target != 0 && input.target != 1) throw InputError("target bit must be 0 or 1");
}

GateScenario build(GateKind kind, const GateInput& input, const GateParams& p, const TimeGrid* grid) {
    GateScenario s;
    s.kind = kind;
    s.input = input;
    auto gate_peak = [](int bit, double peak) { return bit ? peak : 0.0; };
    const PulseEnvelope early(p.peak, -0.5 * p.separation, p.short_width);
    const PulseEnvelope late(p.peak, 0.5 * p.separation, p.short_width);

    if (kind == GateKind::Toffoli3) {
        s.scheme = LevelScheme::lambda3(p.delta);
        const auto pump = late.with_peak(gate_peak(input.controls[0], p.peak));
        const auto stokes = early.with_peak(gate_peak(input.controls[1], p.peak));
        s.pulses = sp_pair(stokes, pump);
        s.level_zero = 1;
        s.level_one = 3;
    } else {
        s.scheme = LevelScheme::resonant_five(p.five_scheme, p.delta);
        const PulseEnvelope omega1(gate_peak(input.controls[0], p.long_peak), p.long_center, p.long_width);
        const auto omega2 = late.with_peak(gate_peak(input.controls[1], p.peak));
        const auto omega3 = early.with_peak(gate_peak(input.controls[2], p.peak));
        s.pulses = PulseSet::five_tied(omega1, omega2, omega3);
        s.level_zero = 1;
        s.level_one = 5;
    }
    s.initial_level = input.target ? s.level_one : s.level_zero;
    if (grid) {
        s.grid = *grid;
    } else {
        s.grid = covering_grid(s.pulses);
        s.grid.tol = p.tol;
        s.grid.samples = p.samples;
    }
    return s;
}

}  // namespace

GateScenario nominal_scenario(GateKind kind, const GateParams& params) {
    params.validate();
    GateInput all_on;
    all_on.controls.assign(static_cast<std::size_t>(control_count(kind)), 1);
    return build(kind, all_on, params, nullptr);
}

GateScenario encode(GateKind kind, const GateInput& input, const GateParams& params) {
    check_input(kind, input);
    // Every row shares the grid of the all-on configuration, so switching a field off never moves the window.
    const GateScenario nominal = nominal_scenario(kind, params);
    return build(kind, input, params, &nominal.grid);
}

ReadoutResult readout(const State& final_state, GateKind kind, double threshold) {
    const int dim = kind == GateKind::Toffoli3 ? 3 : 5;
    if (final_state.size() != dim) throw DimensionError("readout: state dimension does not match gate kind");
    ReadoutResult r;
    r.p_zero = std::norm(final_state(0));
    r.p_one = std::norm(final_state(dim - 1));
    double total = 0.0;
    for (Eigen::Index i = 0; i < final_state.size(); ++i) total += std::norm(final_state(i));
    r.leakage = std::max(0.0, total - r.p_zero - r.p_one);
    const double max_leak = 1.0 - threshold;
    if (r.leakage <= max_leak) {
        if (r.p_one >= threshold)
            r.bit = 1;
        else if (r.p_zero >= threshold)
            r.bit = 0;
    }
    return r;
}

bool GateOutcome::correct(double threshold) const {
    return output_target && *output_target == expected_target && fidelity >= threshold;
}

Trajectory apply_gate(const GateScenario& scenario, const State& initial) {
    const ChainHamiltonian h(scenario.scheme, scenario.pulses,
                             scenario.scheme.is_five_level() ? ResonancePolicy::RequireTwoPhotonResonance
                                                             : ResonancePolicy::Unchecked);
    return integrate(HamiltonianFn(h), initial, scenario.grid);
}

GateOutcome run_gate(const GateScenario& scenario, double threshold) {
    GateOutcome out;
    out.input = scenario.input;
    out.output_controls = scenario.input.controls;
    out.expected_target = toffoli_target(scenario.input);
    out.trajectory = apply_gate(scenario, bare_state(scenario.scheme.dimension(), scenario.initial_level));

    const ReadoutResult r = readout(out.trajectory.final_state(), scenario.kind, threshold);
    out.output_target = r.bit;
    out.fidelity = out.expected_target ? r.p_one : r.p_zero;
    out.opposite = out.expected_target ? r.p_zero : r.p_one;
    out.leakage = r.leakage;
    return out;
}

GateOutcome run_gate(GateKind kind, const GateInput& input, const GateParams& params) {
    return run_gate(encode(kind, input, params), params.threshold);
}

AdiabaticityReport gate_adiabaticity(GateKind kind, const GateParams& params) {
    const GateScenario s = nominal_scenario(kind, params);
    return scan_sequence(s.scheme, s.pulses, s.grid.t_start, s.grid.t_end, 2001, params.short_width);
}

TruthTable truth_table(GateKind kind, const GateParams& params, unsigned workers) {
    params.validate();
    TruthTable table;
    table.kind = kind;
    table.threshold = params.threshold;
    table.adiabaticity = gate_adiabaticity(kind, params);
    for (const auto& c : table.adiabaticity.criteria) {
        if (!c.applicable || c.advisory || c.pass) continue;
        std::ostringstream msg;
        msg << "adiabaticity criterion " << c.name << " = " << c.value << " misses threshold " << c.threshold;
        table.warnings.push_back(msg.str());
    }

    const int bits = control_count(kind) + 1;
    const std::size_t n = std::size_t{1} << bits;
    table.rows.resize(n);
    parallel_for(
        n,
        [&](std::size_t row) {
            GateInput in;
            for (int b = bits - 1; b >= 1; --b) in.controls.push_back(static_cast<int>((row >> b) & 1u));
            in.target = static_cast<int>(row & 1u);
            table.rows[row] = run_gate(kind, in, params);
        },
        workers == 0 ? default_workers() : workers);

    for (std::size_t i = 0; i < n; ++i)
        if (!table.rows[i].correct(params.threshold)) table.failed_rows.push_back(i);
    table.pass = table.failed_rows.empty();
    return table;
}

}  // namespace stirap
