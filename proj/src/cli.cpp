#include "stirap/cli.hpp"

#include "stirap/adiabaticity.hpp"
#include "stirap/config.hpp"
#include "stirap/dressed.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/errors.hpp"
#include "stirap/gates.hpp"
#include "stirap/parallel.hpp"
#include "stirap/propagation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace stirap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + path.string() + "'");
    f << content;
    if (!f) throw ConfigError("failed writing output file '" + path.string() + "'");
}

/// Flags shared by every subcommand that runs gate scenarios.
struct Options {
    std::string config_positional;
    std::string config;
    std::string out;
    std::optional<double> threshold;
    std::optional<double> delta, peak, long_peak, width, long_width, separation, tol;
    std::optional<std::string> five_scheme;
    unsigned workers = 0;

    void add_config(CLI::App* cmd) {
        cmd->add_option("scenario", config_positional, "Scenario JSON file");
        cmd->add_option("--config", config, "Scenario JSON file");
    }

    void add_out(CLI::App* cmd) { cmd->add_option("--out", out, "Output directory"); }

    void add_gate(CLI::App* cmd) {
        cmd->add_option("--threshold", threshold, "Readout threshold (default 0.99)");
        cmd->add_option("--delta", delta, "Single-photon detuning in 1/T");
        cmd->add_option("--peak", peak, "Peak Rabi frequency of the short pulses in 1/T");
        cmd->add_option("--long-peak", long_peak, "Peak of the long Omega_1 = Omega_4 pulse in 1/T");
        cmd->add_option("--width", width, "Short-pulse width");
        cmd->add_option("--long-width", long_width, "Long-pulse width");
        cmd->add_option("--separation", separation, "Distance between the two short pulse centres");
        cmd->add_option("--tol", tol, "Integrator tolerance");
        cmd->add_option("--five-scheme", five_scheme, "m5 or extended_lambda5");
    }

    void add_workers(CLI::App* cmd) {
        cmd->add_option("--workers", workers, "Worker threads (default: STIRAP_WORKERS or hardware)");
    }

    ScenarioFile scenario() const {
        if (!config.empty() && !config_positional.empty() && config != config_positional)
            throw ConfigError("config given both positionally and with --config");
        const std::string& path = config.empty() ? config_positional : config;
        return path.empty() ? ScenarioFile{} : load_scenario(path);
    }

    GateParams gate_params(const ScenarioFile& sc) const {
        GateParams p = sc.gate;
        if (threshold) p.threshold = *threshold;
        if (delta) p.delta = *delta;
        if (peak) p.peak = *peak;
        if (long_peak) p.long_peak = *long_peak;
        if (width) p.short_width = *width;
        if (long_width) p.long_width = *long_width;
        if (separation) p.separation = *separation;
        if (tol) p.tol = *tol;
        if (five_scheme) p.five_scheme = scheme_kind_from_string(*five_scheme);
        try {
            p.validate();
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
        return p;
    }

    std::string out_dir(const ScenarioFile& sc, const std::string& fallback) const {
        if (!out.empty()) return out;
        if (sc.out_dir) return *sc.out_dir;
        return fallback;
    }

    unsigned worker_count() const { return workers == 0 ? default_workers() : workers; }
};

std::string envelope_csv(const LevelScheme& scheme, const PulseSet& pulses, const std::vector<double>& times) {
    const int m = scheme.couplings();
    std::string out = "t";
    for (int k = 1; k <= m; ++k) out += ",Omega_" + std::to_string(k);
    out += "\n";
    std::vector<double> rabi(static_cast<std::size_t>(m));
    char buf[64];
    for (double t : times) {
        pulses.rabi_at(t, rabi);
        std::snprintf(buf, sizeof buf, "%.12g", t);
        out += buf;
        for (double r : rabi) {
            std::snprintf(buf, sizeof buf, ",%.12g", r);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

json trajectory_summary(const Trajectory& traj) {
    json pops = json::array();
    json peaks = json::array();
    for (int l = 1; l <= traj.dimension(); ++l) {
        pops.push_back(final_fidelity(traj, l));
        peaks.push_back(transient_peak(traj, l));
    }
    return {{"final_populations", pops},
            {"peak_populations", peaks},
            {"max_norm_drift", traj.max_norm_drift()},
            {"internal_steps", traj.internal_steps},
            {"rejected_steps", traj.rejected_steps}};
}

json outcome_json(const GateScenario& s, const GateOutcome& o, const GateParams& p) {
    json j = {{"kind", std::string(to_string(s.kind))},
              {"input", o.input.to_string()},
              {"output_controls", o.output_controls},
              {"expected_target", o.expected_target},
              {"output_target", o.output_target ? json(*o.output_target) : json("indeterminate")},
              {"fidelity", o.fidelity},
              {"leakage", o.leakage},
              {"opposite", o.opposite},
              {"correct", o.correct(p.threshold)},
              {"params", to_json(p)},
              {"scheme", to_json(s.scheme)},
              {"pulses", to_json(s.pulses)},
              {"grid", to_json(s.grid)},
              {"initial_level", s.initial_level}};
    j["trajectory"] = trajectory_summary(o.trajectory);
    return j;
}

std::string outcome_line(const GateOutcome& o) {
    std::string out;
    for (int c : o.output_controls) out += static_cast<char>('0' + c);
    out += o.output_target ? static_cast<char>('0' + *o.output_target) : '?';
    return out;
}

// ---- simulate ---------------------------------------------------------------------------------------

int cmd_simulate(const Options& opt, std::ostream& out) {
    const ScenarioFile sc = opt.scenario();
    if (!sc.system) throw ConfigError("simulate needs a scenario with scheme, detunings and pulses");
    const auto& sys = *sc.system;
    TimeGrid grid = sys.grid ? *sys.grid : covering_grid(sys.pulses);
    const Trajectory traj = integrate(sys.scheme, sys.pulses, sys.initial_level, grid);

    out << "final populations:";
    for (int l = 1; l <= traj.dimension(); ++l) out << " rho_" << l << l << "=" << fmt("%.8f", final_fidelity(traj, l));
    out << "\nmax norm drift: " << fmt("%.3e", traj.max_norm_drift()) << "\n";

    const std::string dir = opt.out_dir(sc, "");
    if (!dir.empty()) {
        const fs::path base(dir);
        write_file(base / "simulate_trajectory.csv", trajectory_csv(traj));
        write_file(base / "simulate_envelopes.csv", envelope_csv(sys.scheme, sys.pulses, traj.times()));
        json side = {{"scheme", to_json(sys.scheme)},
                     {"pulses", to_json(sys.pulses)},
                     {"grid", to_json(grid)},
                     {"initial_level", sys.initial_level},
                     {"trajectory", trajectory_summary(traj)}};
        write_file(base / "simulate.json", side.dump(2) + "\n");
        out << "wrote " << (base / "simulate_trajectory.csv").string() << "\n";
    }
    return kOk;
}

// ---- figure -----------------------------------------------------------------------------------------

struct FigureRun {
    std::string tag;
    std::string input;
};

std::vector<FigureRun> figure_runs(int id) {
    switch (id) {
        case 3: return {{"fig3", "1110"}};
        case 4: return {{"fig4", "1111"}};
        case 5: return {{"fig5", "1000"}};
        // The header bits and the caption's three-level description disagree; both are written.
        case 6: return {{"fig6", "1010"}, {"fig6_1100", "1100"}};
        default: throw ConfigError("figure id must be 3, 4, 5 or 6, got " + std::to_string(id));
    }
}

int cmd_figure(const Options& opt, int id, std::ostream& out) {
    const auto runs = figure_runs(id);
    const ScenarioFile sc = opt.scenario();
    const GateParams p = opt.gate_params(sc);
    const fs::path base(opt.out_dir(sc, "out"));
    int code = kOk;
    for (const auto& run : runs) {
        const GateScenario s = encode(GateKind::Toffoli4, GateInput::parse(run.input), p);
        const GateOutcome o = run_gate(s, p.threshold);
        write_file(base / (run.tag + "_trajectory.csv"), trajectory_csv(o.trajectory));
        write_file(base / (run.tag + "_envelopes.csv"), envelope_csv(s.scheme, s.pulses, o.trajectory.times()));
        json side = outcome_json(s, o, p);
        side["figure"] = id;
        write_file(base / (run.tag + ".json"), side.dump(2) + "\n");
        out << run.tag << ": input(" << run.input << ") -> output(" << outcome_line(o) << ")  fidelity "
            << fmt("%.6f", o.fidelity) << "  norm drift " << fmt("%.2e", o.trajectory.max_norm_drift()) << "\n";
        if (!o.correct(p.threshold)) code = kGateMismatch;
    }
    return code;
}

// ---- dressed ----------------------------------------------------------------------------------------

json state_json(const State& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
    return a;
}

int cmd_dressed(const std::string& system, double o1, double o2, double o3, double delta, double ph1, double ph2,
                std::ostream& out) {
    json j;
    if (system == "lambda3") {
        const auto d = lambda3_dressed(o1, o2, delta, ph1, ph2);
        const double rabi[] = {o1, o2};
        const double phases[] = {ph1, ph2};
        const double ladder[] = {0.0, delta, 0.0};
        const Matrix h = assemble_hamiltonian(ladder, rabi, phases);
        const auto num = numeric_spectrum(h);
        j = {{"system", "lambda3"},
             {"theta", d.theta},
             {"phi", d.phi},
             {"eigenvalues", d.eigenvalues},
             {"numeric_eigenvalues", num.values},
             {"dark", state_json(d.dark)},
             {"bright1", state_json(d.bright1)},
             {"bright2", state_json(d.bright2)},
             {"residuals",
              {eigen_residual(h, d.dark, d.eigenvalues[0]), eigen_residual(h, d.bright1, d.eigenvalues[1]),
               eigen_residual(h, d.bright2, d.eigenvalues[2])}}};
    } else if (system == "five") {
        const auto f = five_eigenvectors_tied(o1, o2, o3, delta);
        const double rabi[] = {o1, o2, o3, o1};
        const double phases[] = {0.0, 0.0, 0.0, 0.0};
        const double ladder[] = {0.0, delta, 0.0, delta, 0.0};
        const Matrix h = assemble_hamiltonian(ladder, rabi, phases);
        const auto num = numeric_spectrum(h);
        j = {{"system", "five"},
             {"lambdas", f.lambdas},
             {"numeric_eigenvalues", num.values},
             {"theta", f.theta},
             {"phi1", f.phi1},
             {"phi2", f.phi2},
             {"phi", f.phi},
             {"lambda1", state_json(f.vec_lambda1)},
             {"lambda2", state_json(f.vec_lambda2)},
             {"residuals",
              {eigen_residual(h, f.vec_lambda1, f.lambdas[1]), eigen_residual(h, f.vec_lambda2, f.lambdas[2])}}};
    } else {
        throw ConfigError("dressed --system must be lambda3 or five");
    }
    out << j.dump(2) << "\n";
    return kOk;
}

// ---- adiabaticity -----------------------------------------------------------------------------------

int cmd_adiabaticity(const Options& opt, const std::string& kind_name, std::ostream& out) {
    const ScenarioFile sc = opt.scenario();
    const GateKind kind = kind_name.empty() ? sc.gate_kind.value_or(GateKind::Toffoli4) : gate_kind_from_string(kind_name);
    const GateParams p = opt.gate_params(sc);
    const AdiabaticityReport r = gate_adiabaticity(kind, p);
    out << "worst instant t = " << fmt("%.4f", r.time.value_or(0.0)) << "\n";
    for (const auto& c : r.criteria) {
        const char* rel = c.relation == Relation::MuchGreater ? ">=" : "<=";
        out << "  " << c.name << " = " << fmt("%.4g", c.value) << "  (" << rel << " " << c.threshold << ")  "
            << (!c.applicable ? "n/a" : c.advisory ? "advisory" : c.pass ? "pass" : "FAIL") << "\n";
    }
    out << "overall: " << (r.overall ? "pass" : "FAIL") << "\n";
    if (!opt.out.empty()) {
        json j = to_json(r);
        j["kind"] = std::string(to_string(kind));
        j["params"] = to_json(p);
        write_file(fs::path(opt.out) / ("adiabaticity_" + std::string(to_string(kind)) + ".json"), j.dump(2) + "\n");
    }
    return r.overall ? kOk : kAccuracyFailure;
}

// ---- gate / truth table -----------------------------------------------------------------------------

GateKind resolve_kind(const std::string& flag, const ScenarioFile& sc) {
    if (!flag.empty()) return gate_kind_from_string(flag);
    if (sc.gate_kind) return *sc.gate_kind;
    throw ConfigError("gate kind missing: use --kind toffoli3|toffoli4 or gate.kind in the scenario");
}

int cmd_gate(const Options& opt, const std::string& kind_flag, const std::string& input_flag, std::ostream& out) {
    const ScenarioFile sc = opt.scenario();
    const GateKind kind = resolve_kind(kind_flag, sc);
    const std::string input = !input_flag.empty() ? input_flag : sc.gate_input.value_or("");
    if (input.empty()) throw ConfigError("gate input missing: use --input or gate.input");
    const GateParams p = opt.gate_params(sc);
    const GateScenario s = encode(kind, GateInput::parse(input), p);
    const GateOutcome o = run_gate(s, p.threshold);
    out << to_string(kind) << " input(" << input << ") -> output(" << outcome_line(o) << ")  fidelity "
        << fmt("%.6f", o.fidelity) << "  leakage " << fmt("%.2e", o.leakage) << "  "
        << (o.correct(p.threshold) ? "ok" : "MISMATCH") << "\n";
    if (!o.output_target)
        out << "  indeterminate readout: p0 = " << fmt("%.6f", o.expected_target ? o.opposite : o.fidelity)
            << ", p1 = " << fmt("%.6f", o.expected_target ? o.fidelity : o.opposite) << "\n";
    const std::string dir = opt.out_dir(sc, "");
    if (!dir.empty()) {
        const std::string tag = "gate_" + std::string(to_string(kind)) + "_" + input;
        write_file(fs::path(dir) / (tag + ".json"), outcome_json(s, o, p).dump(2) + "\n");
        write_file(fs::path(dir) / (tag + "_trajectory.csv"), trajectory_csv(o.trajectory));
    }
    return o.correct(p.threshold) ? kOk : kGateMismatch;
}

std::string table_text(const TruthTable& t) {
    const int w = std::max(6, control_count(t.kind) + 1) + 2;
    std::ostringstream os;
    os << std::left << std::setw(w) << "input" << std::setw(w) << "output" << std::setw(12) << "fidelity"
       << std::setw(12) << "leakage"
       << "status\n";
    for (const auto& r : t.rows)
        os << std::setw(w) << r.input.to_string() << std::setw(w) << outcome_line(r) << std::setw(12)
           << fmt("%.6f", r.fidelity) << std::setw(12) << fmt("%.2e", r.leakage)
           << (r.correct(t.threshold) ? "ok" : "FAIL") << "\n";
    os << (t.pass ? "PASS" : "FAIL") << ": " << t.rows.size() - t.failed_rows.size() << "/" << t.rows.size()
       << " rows match at threshold " << t.threshold << "\n";
    for (const auto& msg : t.warnings) os << "warning: " << msg << "\n";
    return os.str();
}

int cmd_truth_table(const Options& opt, const std::string& kind_flag, std::ostream& out) {
    const ScenarioFile sc = opt.scenario();
    const GateKind kind = resolve_kind(kind_flag, sc);
    const GateParams p = opt.gate_params(sc);
    const TruthTable t = truth_table(kind, p, opt.worker_count());
    const std::string text = table_text(t);
    out << text;
    const std::string dir = opt.out_dir(sc, "");
    if (!dir.empty()) {
        json rows = json::array();
        for (const auto& r : t.rows)
            rows.push_back({{"input", r.input.to_string()},
                            {"output", outcome_line(r)},
                            {"expected_target", r.expected_target},
                            {"fidelity", r.fidelity},
                            {"leakage", r.leakage},
                            {"opposite", r.opposite},
                            {"max_norm_drift", r.trajectory.max_norm_drift()},
                            {"correct", r.correct(t.threshold)}});
        json j = {{"kind", std::string(to_string(kind))}, {"params", to_json(p)},     {"rows", rows},
                  {"failed_rows", t.failed_rows},        {"pass", t.pass},            {"warnings", t.warnings},
                  {"adiabaticity", to_json(t.adiabaticity)}};
        const std::string tag = "truth_table_" + std::string(to_string(kind));
        write_file(fs::path(dir) / (tag + ".json"), j.dump(2) + "\n");
        write_file(fs::path(dir) / (tag + ".txt"), text);
    }
    return t.pass ? kOk : kGateMismatch;
}

// ---- propagate --------------------------------------------------------------------------------------

struct PropagateFlags {
    std::string input;
    std::optional<double> q1l_over_delta, length, alpha0, gamma;
    std::optional<int> z_steps;
    bool verify_dz = false;
    int cube_z = 11;
    int cube_tau = 201;
};

int cmd_propagate(const Options& opt, const PropagateFlags& f, std::ostream& out) {
    const ScenarioFile sc = opt.scenario();
    const GateParams p = opt.gate_params(sc);
    MediumSection m = sc.medium.value_or(MediumSection{});
    if (f.q1l_over_delta) {
        m.q.reset();
        m.q1l_over_delta = *f.q1l_over_delta;
    }
    if (f.length) m.length = *f.length;
    if (f.z_steps) m.z_steps = *f.z_steps;
    if (f.verify_dz) m.verify_dz = true;
    if (f.cube_z < 2 || f.cube_tau < 2) throw ConfigError("cube sizes must be >= 2");
    const std::string input = !f.input.empty() ? f.input : sc.gate_input.value_or("1110");
    const GateScenario s = encode(GateKind::Toffoli4, GateInput::parse(input), p);
    MediumConfig cfg = medium_for_gate(s, m, p.delta);
    PropagationResult r;
    try {
        r = propagate_medium(cfg);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }

    const double q1l_over_delta = cfg.q[0] * cfg.length / p.delta;
    out << "toffoli4 input(" << input << ") through q1 L / Delta = " << fmt("%.4g", q1l_over_delta) << ", "
        << cfg.z_steps << " z steps\n";
    out << "  vacuum fidelity " << fmt("%.6f", r.vacuum_fidelity()) << "  exit fidelity "
        << fmt("%.6f", r.final_fidelity()) << "  clamped samples " << r.clamped << "\n";
    if (cfg.verify_dz) out << "  dz halving change " << fmt("%.2e", r.dz_change) << "\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";

    const std::string dir = opt.out_dir(sc, "");
    if (!dir.empty()) {
        std::string cube = "z,tau,Omega_1,Omega_2,Omega_3,Omega_4\n";
        const std::size_t nz = r.z.size(), nt = r.tau.size();
        auto pick = [](std::size_t n, int k, int i) {
            return static_cast<std::size_t>(std::llround(static_cast<double>(n - 1) * i / (k - 1)));
        };
        const int kz = static_cast<int>(std::min<std::size_t>(nz, static_cast<std::size_t>(f.cube_z)));
        const int kt = static_cast<int>(std::min<std::size_t>(nt, static_cast<std::size_t>(f.cube_tau)));
        char buf[96];
        for (int a = 0; a < kz; ++a) {
            const std::size_t iz = kz == 1 ? 0 : pick(nz, kz, a);
            for (int b = 0; b < kt; ++b) {
                const std::size_t it = pick(nt, kt, b);
                std::snprintf(buf, sizeof buf, "%.12g,%.12g", r.z[iz], r.tau[it]);
                cube += buf;
                for (int k = 0; k < 4; ++k) {
                    std::snprintf(buf, sizeof buf, ",%.12g", r.fields[iz][static_cast<std::size_t>(k)][it]);
                    cube += buf;
                }
                cube += "\n";
            }
        }
        write_file(fs::path(dir) / "propagate_cube.csv", cube);

        json drift = json::array();
        for (std::size_t iz = 0; iz < nz; ++iz)
            drift.push_back({r.max_abs_drift(iz, 0), r.max_abs_drift(iz, 1), r.max_abs_drift(iz, 2),
                             r.max_abs_drift(iz, 3)});
        json indicators = {{"q1l_over_delta", q1l_over_delta}};
        if (f.alpha0 && f.gamma)
            indicators["optical_length"] = optical_length_indicator(*f.alpha0, cfg.length, *f.gamma, p.delta);
        json j = {{"input", input},
                  {"params", to_json(p)},
                  {"q", cfg.q},
                  {"length", cfg.length},
                  {"z_steps", cfg.z_steps},
                  {"floor_omega", r.floor_omega},
                  {"drift_divisor", cfg.drift_divisor == DriftDivisor::Omega1 ? "omega1" : "own_field"},
                  {"z", r.z},
                  {"exit_fidelity", r.exit_fidelity},
                  {"max_abs_detuning_drift", drift},
                  {"clamped_samples", r.clamped},
                  {"indicators", indicators},
                  {"single_atom", to_json(r.single_atom)},
                  {"warnings", r.warnings}};
        if (cfg.verify_dz) j["dz_change"] = r.dz_change;
        write_file(fs::path(dir) / "propagate.json", j.dump(2) + "\n");
    }
    return kOk;
}

// ---- scan -------------------------------------------------------------------------------------------

struct ScanFlags {
    std::string axis;
    std::string kind;
    std::string input;
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    bool all_rows = false;
};

int cmd_scan(const Options& opt, const ScanFlags& f, std::ostream& out) {
    static const std::map<std::string, int> axes = {{"delta", 0}, {"peak", 1}, {"delay", 2}, {"width", 3}, {"qL", 4}};
    const auto axis = axes.find(f.axis);
    if (axis == axes.end()) throw ConfigError("scan axis must be one of delta, peak, delay, width, qL");
    if (f.points < 1) throw ConfigError("scan grid is empty: --points must be >= 1");
    const ScenarioFile sc = opt.scenario();
    const GateKind kind = f.kind.empty() ? sc.gate_kind.value_or(GateKind::Toffoli4) : gate_kind_from_string(f.kind);
    if (axis->second == 4 && kind != GateKind::Toffoli4) throw ConfigError("qL scans need toffoli4");
    const GateParams base = opt.gate_params(sc);
    std::string input = !f.input.empty() ? f.input : sc.gate_input.value_or("");
    if (input.empty()) input = std::string(static_cast<std::size_t>(control_count(kind)), '1') + "0";
    const GateInput gin = GateInput::parse(input);

    std::vector<double> values(static_cast<std::size_t>(f.points));
    for (int i = 0; i < f.points; ++i)
        values[static_cast<std::size_t>(i)] = f.points == 1 ? f.from : f.from + (f.to - f.from) * i / (f.points - 1);

    struct Row {
        double fidelity = 0.0;
        double min_criterion = 0.0;
    };
    std::vector<Row> rows(values.size());
    parallel_for(
        values.size(),
        [&](std::size_t i) {
            GateParams p = base;
            const double v = values[i];
            switch (axis->second) {
                case 0: p.delta = v; break;
                case 1: p.peak = p.long_peak = v; break;
                case 2: p.separation = v; break;
                case 3: p.short_width = v; break;
                default: break;
            }
            try {
                p.validate();
            } catch (const InputError& e) {
                throw ConfigError("scan value " + fmt("%g", v) + ": " + e.what());
            }
            Row row;
            row.min_criterion = gate_adiabaticity(kind, p).min_much_greater_value();
            if (axis->second == 4) {
                MediumSection m = sc.medium.value_or(MediumSection{});
                m.q.reset();
                m.q1l_over_delta = v;
                const GateScenario s = encode(kind, gin, p);
                row.fidelity = propagate_medium(medium_for_gate(s, m, p.delta)).final_fidelity();
            } else if (f.all_rows) {
                const TruthTable t = truth_table(kind, p, 1);
                row.fidelity = 1.0;
                for (const auto& r : t.rows) row.fidelity = std::min(row.fidelity, r.fidelity);
            } else {
                row.fidelity = run_gate(kind, gin, p).fidelity;
            }
            rows[i] = row;
        },
        opt.worker_count());

    std::string csv = "parameter,fidelity,min_criterion\n";
    char buf[128];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", values[i], rows[i].fidelity, rows[i].min_criterion);
        csv += buf;
    }
    out << csv;
    const std::string dir = opt.out_dir(sc, "");
    if (!dir.empty()) {
        write_file(fs::path(dir) / ("scan_" + f.axis + ".csv"), csv);
        json j = {{"axis", f.axis},       {"kind", std::string(to_string(kind))},
                  {"input", input},       {"all_rows", f.all_rows},
                  {"values", values},     {"params", to_json(base)}};
        if (sc.medium) j["medium_length"] = sc.medium->length;
        write_file(fs::path(dir) / ("scan_" + f.axis + ".json"), j.dump(2) + "\n");
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adiabatic passage in three- and five-level atoms and the Toffoli gates built on it", "stirap"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Options opt;
    int figure_id = 0;
    std::string kind, input, system = "lambda3";
    double o1 = 0.0, o2 = 0.0, o3 = 0.0, delta = 50.0, ph1 = 0.0, ph2 = 0.0;
    PropagateFlags pf;
    ScanFlags sf;

    auto* simulate = app.add_subcommand("simulate", "Integrate a scenario file and write trajectory CSV");
    opt.add_config(simulate);
    opt.add_out(simulate);

    auto* figure = app.add_subcommand("figure", "Write the trajectory, envelopes and sidecar of a figure scenario");
    figure->add_option("--id", figure_id, "Figure number (3, 4, 5 or 6)")->required();
    opt.add_config(figure);
    opt.add_out(figure);
    opt.add_gate(figure);

    auto* dressed = app.add_subcommand("dressed", "Dressed energies and eigenvectors at one instant");
    dressed->add_option("--system", system, "lambda3 or five")->capture_default_str();
    dressed->add_option("--omega1", o1, "Omega_1 (pump / long field)")->required();
    dressed->add_option("--omega2", o2, "Omega_2")->required();
    dressed->add_option("--omega3", o3, "Omega_3 (five-level only)");
    dressed->add_option("--delta", delta, "Single-photon detuning")->capture_default_str();
    dressed->add_option("--phase1", ph1, "Phase of Omega_1 (lambda3)");
    dressed->add_option("--phase2", ph2, "Phase of Omega_2 (lambda3)");

    auto* adiab = app.add_subcommand("adiabaticity", "Adiabaticity criteria at the worst instant of a gate sequence");
    adiab->add_option("--kind", kind, "toffoli3 or toffoli4");
    opt.add_config(adiab);
    opt.add_out(adiab);
    opt.add_gate(adiab);

    auto* gate = app.add_subcommand("gate", "Run one gate input");
    gate->add_option("--kind", kind, "toffoli3 or toffoli4");
    gate->add_option("--input", input, "Control bits then target bit, e.g. 1110");
    opt.add_config(gate);
    opt.add_out(gate);
    opt.add_gate(gate);

    auto* table = app.add_subcommand("truth-table", "Run every input of a gate");
    table->add_option("--kind", kind, "toffoli3 or toffoli4");
    opt.add_config(table);
    opt.add_out(table);
    opt.add_gate(table);
    opt.add_workers(table);

    auto* propagate = app.add_subcommand("propagate", "Propagate a Toffoli4 pulse sequence through a medium");
    propagate->add_option("--input", pf.input, "Toffoli4 input bits (default 1110)");
    propagate->add_option("--q1l-over-delta", pf.q1l_over_delta, "q_i L / Delta applied to all four couplings");
    propagate->add_option("--length", pf.length, "Medium length");
    propagate->add_option("--z-steps", pf.z_steps, "Number of z steps");
    propagate->add_flag("--verify-dz", pf.verify_dz, "Repeat with half the z step and compare");
    propagate->add_option("--alpha0", pf.alpha0, "Linear absorption coefficient for the optical-length indicator");
    propagate->add_option("--gamma", pf.gamma, "Largest decay rate for the optical-length indicator");
    propagate->add_option("--cube-z", pf.cube_z, "z samples in the CSV cube")->capture_default_str();
    propagate->add_option("--cube-tau", pf.cube_tau, "tau samples in the CSV cube")->capture_default_str();
    opt.add_config(propagate);
    opt.add_out(propagate);
    opt.add_gate(propagate);

    auto* scan = app.add_subcommand("scan", "Sweep one parameter and tabulate fidelity and the weakest criterion");
    scan->add_option("--axis", sf.axis, "delta, peak, delay, width or qL")->required();
    scan->add_option("--from", sf.from, "First value")->required();
    scan->add_option("--to", sf.to, "Last value");
    scan->add_option("--points", sf.points, "Number of values")->required();
    scan->add_option("--kind", sf.kind, "toffoli3 or toffoli4 (default toffoli4)");
    scan->add_option("--input", sf.input, "Gate input (default: all controls on, target 0)");
    scan->add_flag("--all-rows", sf.all_rows, "Report the worst fidelity over the whole truth table");
    opt.add_config(scan);
    opt.add_out(scan);
    opt.add_gate(scan);
    opt.add_workers(scan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (sf.to == 0.0 && !scan->count("--to")) sf.to = sf.from;
        if (*simulate) return cmd_simulate(opt, out);
        if (*figure) return cmd_figure(opt, figure_id, out);
        if (*dressed) return cmd_dressed(system, o1, o2, o3, delta, ph1, ph2, out);
        if (*adiab) return cmd_adiabaticity(opt, kind, out);
        if (*gate) return cmd_gate(opt, kind, input, out);
        if (*table) return cmd_truth_table(opt, kind, out);
        if (*propagate) return cmd_propagate(opt, pf, out);
        if (*scan) return cmd_scan(opt, sf, out);
    } catch (const ResolutionError& e) {
        err << "resolution error at z = " << e.z() << ": " << e.what() << "\n";
        return kAccuracyFailure;
    } catch (const AccuracyError& e) {
        err << "accuracy error: " << e.what() << "\n";
        return kAccuracyFailure;
    } catch (const CoverageError& e) {
        err << "coverage error: " << e.what() << "\n";
        return kAccuracyFailure;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace stirap::cli
