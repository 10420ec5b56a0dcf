#pragma once

#include "cascade/config.hpp"
#include "cascade/phasor.hpp"

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace cascade {

enum class PowerModel { Exact, Inductive };

/// Module angles measured from the grid phasor (grid-synchronous frame).
struct SimState {
    double time = 0.0;
    std::vector<double> angles;
};

struct ClassifyOptions {
    double settle_tol = 0.01;      // fraction of P*
    double settle_window = 0.5;    // s
    double divergence_threshold = std::numbers::pi / 2; // rad, on any |delta_i|
    /// Desynchronization: the pairwise angle spread exceeds this multiple of
    /// max(initial spread, desync_floor).
    double desync_growth = 2.0;
    double desync_floor = 1e-3; // rad

    friend bool operator==(const ClassifyOptions&, const ClassifyOptions&) = default;
};

struct Scenario {
    SystemConfig config;
    std::vector<double> initial_angles; // empty means all zero
    double perturbation = 0.05;         // rad, half-width of the uniform kick
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double t_end = 10.0;
    PowerModel model = PowerModel::Inductive;
    double grid_frequency_offset = 0.0; // rad/s
    std::size_t record_stride = 10;
    ClassifyOptions classify;

    void validate() const;
    /// initial_angles, or N zeros when unset.
    std::vector<double> start_angles() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Sample {
    double time = 0.0;
    std::vector<double> angles;
    std::vector<PowerSample> power;
    std::vector<double> frequency; // rad/s
};

struct Outcome {
    enum class Kind { Settled, Diverged, Undecided };
    Kind kind = Kind::Undecided;
    /// Settling time for Settled, first offending sample for Diverged.
    double time = 0.0;
    /// Diverged because the state stopped being finite.
    bool numerical = false;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<double> rated_power; // P*_i used by the settle check
    Outcome outcome;
};

double droop_frequency(double measured_power, const SystemConfig& config);
double droop_frequency(double measured_power, const ModuleParams& module, double nominal_frequency);

double module_voltage_setpoint(const SystemConfig& config);

/// Module voltage phasors for grid-relative angles (grid at angle 0).
std::vector<Phasor> module_phasors(const SystemConfig& config, std::span<const double> angles);

std::vector<PowerSample> module_powers(const Scenario& scenario, std::span<const double> angles);

std::vector<double> rhs(const SimState& state, const Scenario& scenario);

/// Throws NumericalBlowup when the derivative or the new state is not finite.
SimState step_rk4(const SimState& state, const Scenario& scenario);

Trajectory simulate(const Scenario& scenario);

Outcome classify(const Trajectory& trajectory, const ClassifyOptions& options);

/// Largest wrapped pairwise angle difference.
double angle_spread(std::span<const double> angles);

} // namespace cascade
