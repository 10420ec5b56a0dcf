#include "cascade/droop.hpp"

#include "cascade/errors.hpp"
#include "cascade/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cascade {

void Scenario::validate() const {
    config.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidConfig("dt must be > 0");
    }
    if (!(t_end >= dt) || !std::isfinite(t_end)) {
        throw InvalidConfig("t_end must be >= dt");
    }
    if (!initial_angles.empty() && initial_angles.size() != config.module_count) {
        throw InvalidConfig("initial_angles has " + std::to_string(initial_angles.size()) +
                            " entries, expected N = " + std::to_string(config.module_count));
    }
    if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) {
        throw InvalidConfig("perturbation must be >= 0");
    }
    if (!std::isfinite(grid_frequency_offset)) {
        throw InvalidConfig("grid frequency offset must be finite");
    }
    if (record_stride < 1) {
        throw InvalidConfig("record_stride must be >= 1");
    }
    if (!(classify.settle_tol > 0.0) || !(classify.settle_window >= 0.0) ||
        !(classify.divergence_threshold > 0.0) || !(classify.desync_growth > 1.0) ||
        !(classify.desync_floor > 0.0)) {
        throw InvalidConfig("classification thresholds out of range");
    }
}

std::vector<double> Scenario::start_angles() const {
    if (initial_angles.empty()) {
        return std::vector<double>(config.module_count, 0.0);
    }
    return initial_angles;
}

double droop_frequency(double measured_power, const ModuleParams& module, double nominal_frequency) {
    return nominal_frequency - module.droop_gain * (measured_power - module.rated_power);
}

double droop_frequency(double measured_power, const SystemConfig& config) {
    return droop_frequency(measured_power, ModuleParams{config.rated_power, config.droop_gain, config.voltage_ratio},
                           config.nominal_frequency);
}

double module_voltage_setpoint(const SystemConfig& config) { return config.module_voltage(); }

std::vector<Phasor> module_phasors(const SystemConfig& config, std::span<const double> angles) {
    if (angles.size() != config.module_count) {
        throw InvalidInput("state has " + std::to_string(angles.size()) + " angles, expected N = " +
                           std::to_string(config.module_count));
    }
    std::vector<Phasor> out;
    out.reserve(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        out.emplace_back(config.module_voltage(i), angles[i]);
    }
    return out;
}

std::vector<PowerSample> module_powers(const Scenario& scenario, std::span<const double> angles) {
    const auto voltages = module_phasors(scenario.config, angles);
    const Phasor grid{scenario.config.grid_voltage, 0.0};
    if (scenario.model == PowerModel::Exact) {
        return string_power_exact(voltages, grid, scenario.config.line);
    }
    return string_power_inductive(voltages, grid, scenario.config.z_magnitude());
}

std::vector<double> rhs(const SimState& state, const Scenario& scenario) {
    for (double a : state.angles) {
        if (!std::isfinite(a)) {
            throw NumericalBlowup("non-finite angle in state", state.time);
        }
    }
    const auto power = module_powers(scenario, state.angles);
    std::vector<double> d(power.size());
    for (std::size_t i = 0; i < power.size(); ++i) {
        const ModuleParams m = scenario.config.module(i);
        d[i] = -scenario.grid_frequency_offset - m.droop_gain * (power[i].active - m.rated_power);
        if (!std::isfinite(d[i])) {
            throw NumericalBlowup("non-finite angle derivative", state.time);
        }
    }
    return d;
}

SimState step_rk4(const SimState& state, const Scenario& scenario) {
    if (!(scenario.dt > 0.0)) {
        throw InvalidConfig("dt must be > 0");
    }
    auto f = [&scenario](double t, const std::vector<double>& y) { return rhs(SimState{t, y}, scenario); };
    SimState next{state.time + scenario.dt, rk4_step(f, state.time, state.angles, scenario.dt)};
    for (double& a : next.angles) {
        if (!std::isfinite(a)) {
            throw NumericalBlowup("non-finite angle after step", next.time);
        }
        a = wrap_angle(a);
    }
    return next;
}

double angle_spread(std::span<const double> angles) {
    double spread = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        for (std::size_t j = i + 1; j < angles.size(); ++j) {
            spread = std::max(spread, std::abs(wrap_angle(angles[i] - angles[j])));
        }
    }
    return spread;
}

namespace {

bool diverged(std::span<const double> angles, double initial_spread, const ClassifyOptions& options) {
    for (double a : angles) {
        if (!std::isfinite(a) || std::abs(a) > options.divergence_threshold) {
            return true;
        }
    }
    return angle_spread(angles) > options.desync_growth * std::max(initial_spread, options.desync_floor);
}

Sample make_sample(const Scenario& scenario, const SimState& state) {
    Sample s;
    s.time = state.time;
    s.angles = state.angles;
    s.power = module_powers(scenario, state.angles);
    s.frequency.reserve(s.power.size());
    for (std::size_t i = 0; i < s.power.size(); ++i) {
        s.frequency.push_back(
            droop_frequency(s.power[i].active, scenario.config.module(i), scenario.config.nominal_frequency));
    }
    return s;
}

} // namespace

Outcome classify(const Trajectory& trajectory, const ClassifyOptions& options) {
    const auto& samples = trajectory.samples;
    if (samples.empty()) {
        return {};
    }
    const double initial_spread = angle_spread(samples.front().angles);
    for (const auto& s : samples) {
        if (diverged(s.angles, initial_spread, options)) {
            return {Outcome::Kind::Diverged, s.time, false};
        }
    }

    auto in_band = [&](const Sample& s) {
        for (std::size_t i = 0; i < s.power.size(); ++i) {
            const double p_star = trajectory.rated_power.at(i);
            if (!(std::abs(s.power[i].active - p_star) < options.settle_tol * std::abs(p_star))) {
                return false;
            }
        }
        return true;
    };
    std::size_t first_good = samples.size();
    for (std::size_t i = samples.size(); i-- > 0;) {
        if (!in_band(samples[i])) {
            break;
        }
        first_good = i;
    }
    if (first_good == samples.size()) {
        return {};
    }
    const double settle_time = samples[first_good].time;
    if (samples.back().time - settle_time < options.settle_window) {
        return {};
    }
    return {Outcome::Kind::Settled, settle_time, false};
}

Trajectory simulate(const Scenario& scenario) {
    scenario.validate();
    const std::size_t n = scenario.config.module_count;

    SimState state;
    state.angles = scenario.start_angles();
    if (scenario.perturbation > 0.0) {
        std::mt19937_64 rng(scenario.seed);
        std::uniform_real_distribution<double> kick(-scenario.perturbation, scenario.perturbation);
        for (double& a : state.angles) {
            a += kick(rng);
        }
    }
    for (double& a : state.angles) {
        a = wrap_angle(a);
    }

    Trajectory traj;
    traj.rated_power.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        traj.rated_power.push_back(scenario.config.module(i).rated_power);
    }
    traj.samples.push_back(make_sample(scenario, state));

    const double initial_spread = angle_spread(state.angles);
    const auto steps = static_cast<std::size_t>(std::llround(scenario.t_end / scenario.dt));
    for (std::size_t step = 1; step <= steps; ++step) {
        try {
            state = step_rk4(state, scenario);
        } catch (const NumericalBlowup& e) {
            traj.outcome = {Outcome::Kind::Diverged, e.time(), true};
            return traj;
        }
        state.time = static_cast<double>(step) * scenario.dt;
        const bool gone = diverged(state.angles, initial_spread, scenario.classify);
        if (gone || step % scenario.record_stride == 0 || step == steps) {
            traj.samples.push_back(make_sample(scenario, state));
        }
        if (gone) {
            break;
        }
    }
    traj.outcome = classify(traj, scenario.classify);
    return traj;
}

} // namespace cascade
