#pragma once

#include "cascade/phasor.hpp"

#include <cstddef>
#include <numbers>
#include <vector>

namespace cascade {

/// Which magnitude stands in for |Z_line| in the lossless-line formulas.
enum class ZMagnitudeMode {
    Full,          // sqrt(R^2 + X^2)
    ReactanceOnly, // X
};

/// Droop parameters of one module.
struct ModuleParams {
    double rated_power;   // W
    double droop_gain;    // (rad/s)/W
    double voltage_ratio; // V_g / V_i

    friend bool operator==(const ModuleParams&, const ModuleParams&) = default;
};

/// Grid, line and string parameters. Every module shares `rated_power`,
/// `droop_gain` and `voltage_ratio` unless `module_overrides` is non-empty,
/// in which case it must hold exactly `module_count` entries.
struct SystemConfig {
    double grid_voltage = 311.0;                           // V (peak)
    double grid_angle = 0.0;                               // rad
    double nominal_frequency = 2.0 * std::numbers::pi * 50; // rad/s
    LineImpedance line{0.1, 0.5};
    std::size_t module_count = 6;
    double voltage_ratio = 6.2;
    double rated_power = 4000.0; // W
    double droop_gain = 1.2e-3;  // (rad/s)/W
    ZMagnitudeMode z_mode = ZMagnitudeMode::Full;
    std::vector<ModuleParams> module_overrides;

    /// Throws InvalidConfig on the first violated invariant.
    void validate() const;

    /// V* = V_g / M.
    double module_voltage() const;
    double z_magnitude() const noexcept;
    bool homogeneous() const noexcept;
    ModuleParams module(std::size_t index) const;
    double module_voltage(std::size_t index) const;

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

} // namespace cascade
