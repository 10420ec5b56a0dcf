// Command-line front end: simulate | analyze | sweep | cases.
//
// Exit status: 0 settled (or stable / report produced), 1 usage or config
// error, 2 diverged or unstable, 3 numerical failure, 4 undecided run.

#include "cascade/errors.hpp"
#include "cascade/runs.hpp"
#include "cascade/scenario_file.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unistd.h>

namespace {

using namespace cascade;

enum Exit { kOk = 0, kUsage = 1, kDiverged = 2, kNumerical = 3, kUndecided = 4 };

struct CommonOptions {
    std::string scenario_path;
    int preset = 0;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<double> perturbation;
    std::string out;
    std::string zmag;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--scenario", o.scenario_path, "Scenario file")->check(CLI::ExistingFile);
    cmd->add_option("--case", o.preset, "Built-in preset 1, 2 or 3 (M = 5.8, 6.2, 7.0)")->check(CLI::Range(1, 3));
    cmd->add_option("--dt", o.dt, "Integrator step [s]");
    cmd->add_option("--t-end", o.t_end, "Simulated time [s]");
    cmd->add_option("--model", o.model, "Power model")->check(CLI::IsMember({"exact", "inductive"}));
    cmd->add_option("--seed", o.seed, "Perturbation RNG seed");
    cmd->add_option("--perturb", o.perturbation, "Initial angle perturbation half-width [rad]");
    cmd->add_option("--out", o.out, "Output path");
    cmd->add_option("--zmag", o.zmag, "Impedance magnitude used by the lossless-line formulas")
        ->check(CLI::IsMember({"full", "reactance-only"}));
}

Scenario resolve(const CommonOptions& o) {
    if (!o.scenario_path.empty() && o.preset != 0) {
        throw InvalidInput("give either --scenario or --case, not both");
    }
    Scenario sc;
    if (!o.scenario_path.empty()) {
        std::ifstream in(o.scenario_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        sc = parse_scenario(buf.str());
    } else if (o.preset != 0) {
        sc = preset_scenario(o.preset);
    } else {
        throw InvalidInput("one of --scenario or --case is required");
    }
    if (o.dt) sc.dt = *o.dt;
    if (o.t_end) sc.t_end = *o.t_end;
    if (!o.model.empty()) sc.model = o.model == "exact" ? PowerModel::Exact : PowerModel::Inductive;
    if (o.seed) sc.seed = *o.seed;
    if (o.perturbation) sc.perturbation = *o.perturbation;
    if (!o.zmag.empty()) {
        sc.config.z_mode = o.zmag == "full" ? ZMagnitudeMode::Full : ZMagnitudeMode::ReactanceOnly;
    }
    sc.validate();
    return sc;
}

bool use_color() { return std::getenv("CASCADE_DROOP_NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) != 0; }

std::string paint(std::string_view text, bool good) {
    if (!use_color()) return std::string(text);
    return fmt::format("\x1b[1;{}m{}\x1b[0m", good ? 32 : 31, text);
}

int cmd_simulate(const CommonOptions& o) {
    const Scenario sc = resolve(o);
    const RunReport rep = run_simulate(sc, o.out);
    std::cout << rep.text;
    for (const auto& f : rep.files) std::cout << "wrote " << f.string() << "\n";
    switch (rep.outcome.kind) {
    case Outcome::Kind::Settled:
        std::cout << paint("SETTLED", true) << "\n";
        return kOk;
    case Outcome::Kind::Diverged:
        std::cout << paint("DIVERGED", false) << "\n";
        return rep.outcome.numerical ? kNumerical : kDiverged;
    case Outcome::Kind::Undecided:
        std::cout << paint("UNDECIDED", false) << "\n";
        return kUndecided;
    }
    return kUndecided;
}

int cmd_analyze(const CommonOptions& o, bool json) {
    const Scenario sc = resolve(o);
    AnalyzeResult res;
    try {
        res = run_analyze(sc);
    } catch (const NoEquilibrium& e) {
        std::cout << "no equilibrium: " << e.what() << "\n";
        return kDiverged;
    }
    std::cout << (json ? res.json + "\n" : res.text);
    if (!o.out.empty()) {
        std::ofstream out(o.out, std::ios::binary);
        if (!out) throw Error("cannot open " + o.out + " for writing");
        out << res.json << "\n";
    }
    if (!json) {
        const bool stable = res.report.verdict == Verdict::Stable;
        std::cout << paint(stable ? "STABLE" : "UNSTABLE", stable) << "\n";
    }
    return res.report.verdict == Verdict::Stable ? kOk : kDiverged;
}

int cmd_sweep(const CommonOptions& o, const DesignConstraints& constraints) {
    const Scenario sc = resolve(o);
    const SweepResult res = run_sweep(sc, constraints, o.out);
    std::ostringstream table;
    write_design_csv(table, res.rows);
    std::cout << (o.out.empty() ? table.str() : "wrote " + o.out + "\n");
    std::cout << res.recommendation_line << "\n";
    return kOk;
}

int cmd_cases() {
    std::cout << fmt::format("{:>4} {:>5} {:>12} {:>14} {:>10} {:>9}\n", "case", "M", "V* [V]", "V* listed [V]",
                             "margin", "verdict");
    for (int i = 1; i <= 3; ++i) {
        const Scenario sc = preset_scenario(i);
        const StabilityReport r = analyze(sc.config);
        std::cout << fmt::format("{:>4} {:>5.1f} {:>12.4f} {:>14.1f} {:>+10.4f} {:>9}\n", i, sc.config.voltage_ratio,
                                 sc.config.module_voltage(), preset_table_voltage(i), r.margin, to_string(r.verdict));
    }
    std::cout << "common: V_g = 311 V, f = 50 Hz, P* = 4 kW, k = 1.2e-3, Z = 0.1 + j0.5 ohm, N = 6\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized P-omega droop simulator for series-cascaded grid-connected inverters"};
    app.require_subcommand(1);

    CommonOptions sim_opts, an_opts, sw_opts;
    auto* sim = app.add_subcommand("simulate", "Integrate the droop dynamics and classify the run");
    add_common(sim, sim_opts);

    bool json = false;
    auto* an = app.add_subcommand("analyze", "Closed-form equilibrium and small-signal report");
    add_common(an, an_opts);
    an->add_flag("--json", json, "Print the machine-readable report");

    DesignConstraints constraints;
    auto* sw = app.add_subcommand("sweep", "Tabulate the voltage-ratio tradeoff and recommend M");
    add_common(sw, sw_opts);
    sw->add_option("--m-low", constraints.ratio_low, "Lowest M");
    sw->add_option("--m-high", constraints.ratio_high, "Highest M");
    sw->add_option("--m-step", constraints.ratio_step, "M step");
    sw->add_option("--min-pf", constraints.min_power_factor, "Power factor floor");
    sw->add_option("--min-margin", constraints.min_margin, "Stability margin floor");

    auto* cases = app.add_subcommand("cases", "List the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_opts);
        if (an->parsed()) return cmd_analyze(an_opts, json);
        if (sw->parsed()) return cmd_sweep(sw_opts, constraints);
        if (cases->parsed()) return cmd_cases();
    } catch (const NumericalBlowup& e) {
        std::cerr << "numerical failure at t = " << e.time() << " s: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
