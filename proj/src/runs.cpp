#include "cascade/runs.hpp"

#include "cascade/errors.hpp"
#include "cascade/scenario_file.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cascade {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string sig9(double v) { return fmt::format("{:.9g}", v); }

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::optional<StabilityReport> try_analyze(const SystemConfig& config, std::string& why) {
    try {
        return analyze(config);
    } catch (const Error& e) {
        why = e.what();
        return std::nullopt;
    }
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    const std::size_t n = trajectory.rated_power.size();
    out << "t";
    for (const char* prefix : {"delta_", "P_", "Q_", "f_", "pf_"}) {
        for (std::size_t i = 1; i <= n; ++i) out << ',' << prefix << i;
    }
    out << '\n';
    for (const auto& s : trajectory.samples) {
        out << sig9(s.time);
        for (double a : s.angles) out << ',' << sig9(a);
        for (const auto& p : s.power) out << ',' << sig9(p.active);
        for (const auto& p : s.power) out << ',' << sig9(p.reactive);
        for (double w : s.frequency) out << ',' << sig9(w / kTwoPi);
        for (const auto& p : s.power) out << ',' << sig9(p.power_factor);
        out << '\n';
    }
}

std::string_view to_string(Outcome::Kind kind) noexcept {
    switch (kind) {
    case Outcome::Kind::Settled:
        return "SETTLED";
    case Outcome::Kind::Diverged:
        return "DIVERGED";
    case Outcome::Kind::Undecided:
        return "UNDECIDED";
    }
    return "UNKNOWN";
}

std::string format_run_report(const Scenario& scenario, const Trajectory& trajectory,
                              const std::optional<StabilityReport>& stability) {
    std::ostringstream out;
    const Outcome& oc = trajectory.outcome;
    out << fmt::format("model: {}  N = {}  M = {}  dt = {} s  t_end = {} s  seed = {}  perturbation = {} rad\n",
                       scenario.model == PowerModel::Exact ? "exact" : "inductive", scenario.config.module_count,
                       scenario.config.voltage_ratio, scenario.dt, scenario.t_end, scenario.seed,
                       scenario.perturbation);
    switch (oc.kind) {
    case Outcome::Kind::Settled:
        out << fmt::format("outcome: SETTLED, settling time {:.3f} s\n", oc.time);
        break;
    case Outcome::Kind::Diverged:
        out << fmt::format("outcome: DIVERGED at t = {:.3f} s{}\n", oc.time,
                           oc.numerical ? " (numerical blowup)" : "");
        break;
    case Outcome::Kind::Undecided:
        out << "outcome: UNDECIDED (power not inside the settle band for the final window)\n";
        break;
    }
    if (trajectory.samples.empty()) {
        return out.str();
    }

    const Sample& last = trajectory.samples.back();
    out << fmt::format("\nfinal sample, t = {:.3f} s\n", last.time);
    out << fmt::format("{:>6} {:>12} {:>12} {:>8} {:>12} {:>11}\n", "module", "P [W]", "Q [var]", "PF", "f [Hz]",
                       "delta [rad]");
    for (std::size_t i = 0; i < last.power.size(); ++i) {
        out << fmt::format("{:>6} {:>12.3f} {:>12.3f} {:>8.5f} {:>12.6f} {:>11.6f}\n", i + 1, last.power[i].active,
                           last.power[i].reactive, last.power[i].power_factor, last.frequency[i] / kTwoPi,
                           last.angles[i]);
    }

    if (stability) {
        double p = 0, q = 0, pf = 0, f = 0;
        for (std::size_t i = 0; i < last.power.size(); ++i) {
            p += last.power[i].active;
            q += last.power[i].reactive;
            pf += last.power[i].power_factor;
            f += last.frequency[i];
        }
        const double n = static_cast<double>(last.power.size());
        const Complex pcc_sum = [&] {
            Complex sum{0.0, 0.0};
            for (const auto& v : module_phasors(scenario.config, last.angles)) sum += v.to_complex();
            return sum;
        }();
        out << "\npredicted (closed form) vs simulated (final sample, module mean)\n";
        out << fmt::format("{:<18} {:>14} {:>14}\n", "quantity", "predicted", "simulated");
        out << fmt::format("{:<18} {:>14.3f} {:>14.3f}\n", "P_i [W]", scenario.config.rated_power, p / n);
        out << fmt::format("{:<18} {:>14.3f} {:>14.3f}\n", "Q_i [var]", stability->predicted_reactive, q / n);
        out << fmt::format("{:<18} {:>14.5f} {:>14.5f}\n", "power factor", stability->predicted_power_factor,
                           pf / n);
        out << fmt::format("{:<18} {:>14.6f} {:>14.6f}\n", "f [Hz]", scenario.config.nominal_frequency / kTwoPi,
                           f / n / kTwoPi);
        out << fmt::format("{:<18} {:>14.6f} {:>14.6f}\n", "power angle [rad]", stability->power_angle,
                           std::arg(pcc_sum));
        out << fmt::format("{:<18} {:>14.5f}\n", "margin", stability->margin);
        out << fmt::format("{:<18} {:>14}\n", "verdict", to_string(stability->verdict));
    }
    return out.str();
}

RunReport run_simulate(const Scenario& scenario, const std::filesystem::path& csv_path) {
    RunReport rep;
    rep.scenario_text = format_scenario(scenario);
    const Trajectory traj = simulate(scenario);
    rep.outcome = traj.outcome;
    if (scenario.config.homogeneous()) {
        rep.stability = try_analyze(scenario.config, rep.stability_error);
    } else {
        rep.stability_error = "per-module parameters: closed-form prediction not applicable";
    }
    rep.text = format_run_report(scenario, traj, rep.stability);
    if (!rep.stability_error.empty()) {
        rep.text += "\nno closed-form prediction: " + rep.stability_error + "\n";
    }

    if (!csv_path.empty()) {
        {
            auto out = open_for_write(csv_path);
            write_trajectory_csv(out, traj);
        }
        rep.files.push_back(csv_path);
        std::filesystem::path report_path = csv_path;
        report_path.replace_extension(".report.txt");
        {
            auto out = open_for_write(report_path);
            out << rep.text << "\n# resolved scenario\n" << rep.scenario_text;
        }
        rep.files.push_back(report_path);
    }
    return rep;
}

AnalyzeResult run_analyze(const Scenario& scenario) {
    const SystemConfig& cfg = scenario.config;
    AnalyzeResult res;
    res.report = analyze(cfg);
    const StabilityReport& r = res.report;

    std::ostringstream out;
    out << fmt::format("N = {}  M = {}  V* = {:.4f} V  |Z| = {:.6f} ohm ({})\n", cfg.module_count,
                       cfg.voltage_ratio, cfg.module_voltage(), cfg.z_magnitude(),
                       cfg.z_mode == ZMagnitudeMode::Full ? "full" : "reactance only");
    out << fmt::format("transfer capacity S_C     {:.3f} W\n", r.transfer_capacity);
    out << fmt::format("power angle (principal)   {:.6f} rad ({:.3f} deg)\n", r.power_angle,
                       r.power_angle * 180.0 / std::numbers::pi);
    out << fmt::format("power angle (reflected)   {:.6f} rad ({:.3f} deg)\n", r.reflected_angle,
                       r.reflected_angle * 180.0 / std::numbers::pi);
    out << fmt::format("stability margin          {:+.6f}\n", r.margin);
    out << fmt::format("coupling gain k'          {:.6f} 1/s\n", r.gain);
    out << "eigenvalues (closed form) ";
    for (double e : r.eigenvalues) out << fmt::format(" {:.6f}", e);
    out << "\neigenvalues (Jacobi)      ";
    for (double e : r.numeric_eigenvalues) out << fmt::format(" {:.6f}", e);
    out << fmt::format("\nsteady reactive power     {:.3f} var\n", r.predicted_reactive);
    out << fmt::format("predicted power factor    {:.5f}", r.predicted_power_factor);
    if (cfg.voltage_ratio == 6.2 && cfg.module_count == 6) {
        out << fmt::format("  (reference simulation: {:.3f})", kReferenceCase2PowerFactor);
    }
    out << fmt::format("\nverdict                   {}\n", to_string(r.verdict));
    res.text = out.str();

    nlohmann::json j;
    j["transfer_capacity"] = r.transfer_capacity;
    j["power_angle"] = r.power_angle;
    j["reflected_angle"] = r.reflected_angle;
    j["margin"] = r.margin;
    j["gain"] = r.gain;
    j["eigenvalues"] = r.eigenvalues;
    j["numeric_eigenvalues"] = r.numeric_eigenvalues;
    j["predicted_reactive"] = r.predicted_reactive;
    j["predicted_power_factor"] = r.predicted_power_factor;
    j["verdict"] = std::string(to_string(r.verdict));
    res.json = j.dump(2);
    return res;
}

void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows) {
    out << "M,V_star,feasible,delta_bar,margin,slow_eigenvalue,settling_estimate,Q,pf,verdict\n";
    for (const auto& r : rows) {
        out << sig9(r.voltage_ratio) << ',' << sig9(r.module_voltage) << ',' << (r.feasible ? 1 : 0) << ','
            << sig9(r.power_angle) << ',' << sig9(r.margin) << ',' << sig9(r.slow_eigenvalue) << ','
            << sig9(r.settling_estimate) << ',' << sig9(r.reactive) << ',' << sig9(r.power_factor) << ','
            << (r.feasible ? to_string(r.verdict) : "infeasible") << '\n';
    }
}

SweepResult run_sweep(const Scenario& scenario, const DesignConstraints& constraints,
                      const std::filesystem::path& csv_path) {
    constraints.validate();
    SweepResult res;
    res.rows = sweep_voltage_ratio(scenario.config, constraints.ratio_low, constraints.ratio_high,
                                   constraints.ratio_step);
    res.recommendation = recommend_voltage_ratio(scenario.config, constraints);
    if (res.recommendation.row) {
        const DesignRow& r = *res.recommendation.row;
        res.recommendation_line =
            fmt::format("recommended M = {:.4g} (V* = {:.3f} V, margin {:+.4f}, PF {:.4f}, settling ~{:.2f} s)",
                        r.voltage_ratio, r.module_voltage, r.margin, r.power_factor, r.settling_estimate);
    } else {
        res.recommendation_line = "no feasible M: " + res.recommendation.binding_constraint;
    }
    if (!csv_path.empty()) {
        auto out = open_for_write(csv_path);
        write_design_csv(out, res.rows);
    }
    return res;
}

} // namespace cascade
