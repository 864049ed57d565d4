#include "stirap/config.hpp"

#include "stirap/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace stirap {

using nlohmann::json;

namespace {

/// Reads keys from one JSON object and rejects whatever was not consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path_ + "." + key + ": must be finite");
        return d;
    }

    void number(const std::string& key, double& out) {
        if (has(key)) out = number(key);
    }

    void integer(const std::string& key, int& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
        out = v.get<int>();
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(path_ + "." + key + ": expected true or false");
        out = v.get<bool>();
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
            out.push_back(e.get<double>());
            if (!std::isfinite(out.back())) throw ConfigError(path_ + "." + key + ": values must be finite");
        }
        return out;
    }

    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

PulseEnvelope parse_pulse(const json& j, const std::string& path) {
    Section s(j, path);
    const double peak = s.number("peak");
    const double center = s.number("center");
    const double width = s.number("width");
    double phase = 0.0;
    s.number("phase", phase);
    s.finish();
    try {
        return {peak, center, width, phase};
    } catch (const InputError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

TimeGrid parse_grid(const json& j, const std::string& path) {
    Section s(j, path);
    TimeGrid g;
    s.number("t_start", g.t_start);
    s.number("t_end", g.t_end);
    s.integer("steps", g.steps);
    s.boolean("adaptive", g.adaptive);
    s.number("tol", g.tol);
    s.integer("samples", g.samples);
    s.boolean("verify_halving", g.verify_halving);
    s.finish();
    try {
        g.validate();
    } catch (const InputError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return g;
}

SchemeKind parse_scheme_kind(const std::string& name, const std::string& path) {
    try {
        return scheme_kind_from_string(name);
    } catch (const InputError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

SystemSection parse_system(Section& root) {
    SystemSection sys;
    const SchemeKind kind = parse_scheme_kind(root.text("scheme"), "scheme");
    const auto deltas = root.numbers("detunings");
    const auto& pulses_json = root.raw("pulses");
    if (!pulses_json.is_array()) throw ConfigError("pulses: expected an array");
    std::vector<PulseEnvelope> env;
    for (std::size_t i = 0; i < pulses_json.size(); ++i)
        env.push_back(parse_pulse(pulses_json[i], "pulses[" + std::to_string(i) + "]"));
    bool tie = false;
    root.boolean("tie_1_4", tie);
    root.integer("initial_level", sys.initial_level);
    if (root.has("grid")) sys.grid = parse_grid(root.raw("grid"), "grid");

    try {
        sys.scheme = LevelScheme::make(kind, deltas);
        switch (kind) {
            case SchemeKind::TwoLevel:
                if (env.size() != 1) throw ConfigError("pulses: two_level needs exactly 1 pulse");
                sys.pulses = PulseSet::two_level(env[0]);
                break;
            case SchemeKind::Lambda3:
                if (env.size() != 2) throw ConfigError("pulses: lambda3 needs [pump, stokes]");
                sys.pulses = PulseSet::lambda3(env[0], env[1]);
                break;
            default:
                if (tie) {
                    if (env.size() != 3) throw ConfigError("pulses: tied five-level schemes need 3 pulses");
                    sys.pulses = PulseSet::five_tied(env[0], env[1], env[2]);
                } else {
                    if (env.size() != 4) throw ConfigError("pulses: five-level schemes need 4 pulses");
                    sys.pulses = PulseSet::five(env[0], env[1], env[2], env[3]);
                }
        }
        check_compatible(sys.scheme, sys.pulses);
        bare_state(sys.scheme.dimension(), sys.initial_level);
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
    return sys;
}

void parse_gate(const json& j, ScenarioFile& out) {
    Section s(j, "gate");
    GateParams& p = out.gate;
    if (s.has("kind")) {
        try {
            out.gate_kind = gate_kind_from_string(s.text("kind"));
        } catch (const InputError& e) {
            throw ConfigError(std::string("gate.kind: ") + e.what());
        }
    }
    if (s.has("input")) out.gate_input = s.text("input");
    s.number("delta", p.delta);
    s.number("peak", p.peak);
    s.number("long_peak", p.long_peak);
    s.number("short_width", p.short_width);
    s.number("long_width", p.long_width);
    s.number("separation", p.separation);
    s.number("long_center", p.long_center);
    if (s.has("five_scheme")) p.five_scheme = parse_scheme_kind(s.text("five_scheme"), "gate.five_scheme");
    s.number("threshold", p.threshold);
    s.number("tol", p.tol);
    s.integer("samples", p.samples);
    s.finish();
    try {
        p.validate();
        if (out.gate_kind && out.gate_input) encode(*out.gate_kind, GateInput::parse(*out.gate_input), p);
    } catch (const InputError& e) {
        throw ConfigError(std::string("gate: ") + e.what());
    }
}

MediumSection parse_medium(const json& j) {
    Section s(j, "medium");
    MediumSection m;
    if (s.has("q")) {
        const auto q = s.numbers("q");
        if (q.size() != 4) throw ConfigError("medium.q: expected 4 couplings");
        m.q = std::array<double, 4>{q[0], q[1], q[2], q[3]};
    }
    if (s.has("q1l_over_delta")) m.q1l_over_delta = s.number("q1l_over_delta");
    if (m.q && m.q1l_over_delta) throw ConfigError("medium: give either q or q1l_over_delta, not both");
    s.number("length", m.length);
    s.integer("z_steps", m.z_steps);
    s.number("floor_fraction", m.floor_fraction);
    if (s.has("drift_divisor")) {
        const auto d = s.text("drift_divisor");
        if (d == "omega1")
            m.drift_divisor = DriftDivisor::Omega1;
        else if (d == "own_field")
            m.drift_divisor = DriftDivisor::OwnField;
        else
            throw ConfigError("medium.drift_divisor: expected omega1 or own_field");
    }
    s.boolean("verify_dz", m.verify_dz);
    s.number("dz_tol", m.dz_tol);
    s.finish();
    if (m.q1l_over_delta && *m.q1l_over_delta < 0.0) throw ConfigError("medium.q1l_over_delta: must be >= 0");
    if (m.length < 0.0) throw ConfigError("medium.length: must be >= 0");
    if (m.z_steps < 1) throw ConfigError("medium.z_steps: must be >= 1");
    return m;
}

}  // namespace

ScenarioFile parse_scenario(const json& j) {
    Section root(j, "scenario");
    ScenarioFile out;
    if (root.has("scheme") || root.has("pulses") || root.has("detunings")) out.system = parse_system(root);
    if (root.has("gate")) parse_gate(root.raw("gate"), out);
    if (root.has("medium")) out.medium = parse_medium(root.raw("medium"));
    if (root.has("output")) {
        Section o(root.raw("output"), "output");
        if (o.has("dir")) out.out_dir = o.text("dir");
        o.finish();
    }
    root.finish();
    return out;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file '" + path + "': " + e.what());
    }
    return parse_scenario(j);
}

json to_json(const GateParams& p) {
    return {{"delta", p.delta},
            {"peak", p.peak},
            {"long_peak", p.long_peak},
            {"short_width", p.short_width},
            {"long_width", p.long_width},
            {"separation", p.separation},
            {"long_center", p.long_center},
            {"five_scheme", std::string(to_string(p.five_scheme))},
            {"threshold", p.threshold},
            {"tol", p.tol},
            {"samples", p.samples}};
}

json to_json(const PulseEnvelope& e) {
    return {{"peak", e.peak()}, {"center", e.center()}, {"width", e.width()}, {"phase", e.phase()}};
}

json to_json(const LevelScheme& s) {
    return {{"scheme", std::string(to_string(s.kind()))},
            {"detunings", s.single_photon_detunings()},
            {"ladder", s.ladder()}};
}

json to_json(const PulseSet& p) {
    json pulses = json::array();
    for (const auto& e : p.stored()) pulses.push_back(to_json(e));
    return {{"pulses", pulses}, {"tie_1_4", p.tie_1_4()}};
}

json to_json(const TimeGrid& g) {
    return {{"t_start", g.t_start}, {"t_end", g.t_end},   {"steps", g.steps},
            {"adaptive", g.adaptive}, {"tol", g.tol},      {"samples", g.samples},
            {"verify_halving", g.verify_halving}};
}

json to_json(const AdiabaticityReport& r) {
    json crit = json::array();
    for (const auto& c : r.criteria) {
        const char* rel = c.relation == Relation::MuchGreater ? ">>" : c.relation == Relation::MuchLess ? "<<" : "~";
        crit.push_back({{"name", c.name},
                        {"formula", c.formula_id},
                        {"value", c.value},
                        {"relation", rel},
                        {"threshold", c.threshold},
                        {"applicable", c.applicable},
                        {"advisory", c.advisory},
                        {"pass", c.pass}});
    }
    json out = {{"criteria", crit}, {"overall", r.overall}};
    if (r.time) out["time"] = *r.time;
    return out;
}

MediumConfig medium_for_gate(const GateScenario& scenario, const MediumSection& medium, double delta) {
    MediumConfig cfg;
    cfg.scheme = scenario.scheme;
    cfg.input = scenario.pulses;
    cfg.tau = scenario.grid;
    cfg.initial_level = scenario.initial_level;
    cfg.target_level = toffoli_target(scenario.input) ? scenario.level_one : scenario.level_zero;
    cfg.length = medium.length;
    cfg.z_steps = medium.z_steps;
    cfg.floor_fraction = medium.floor_fraction;
    cfg.drift_divisor = medium.drift_divisor;
    cfg.verify_dz = medium.verify_dz;
    cfg.dz_tol = medium.dz_tol;
    if (medium.q) {
        cfg.q = *medium.q;
    } else {
        const double ratio = medium.q1l_over_delta.value_or(0.0);
        const double q = medium.length > 0.0 ? ratio * delta / medium.length : 0.0;
        cfg.q = {q, q, q, q};
    }
    return cfg;
}

}  // namespace stirap
