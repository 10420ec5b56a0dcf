#pragma once

#include "cascade/droop.hpp"
#include "cascade/errors.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cascade {

/// Parse failure. `problems` holds every issue found, each prefixed with its
/// line number where one applies.
class ScenarioError : public InvalidConfig {
  public:
    explicit ScenarioError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

  private:
    std::vector<std::string> problems_;
};

/// Parses the sectioned key-value scenario format:
///
///     [grid]     voltage, angle, frequency, frequency_offset
///     [line]     resistance, reactance, z_magnitude = full | reactance-only
///     [modules]  count, ratio and/or voltage, rated_power, droop_gain
///     [module.<i>]  per-module rated_power, droop_gain, ratio (1-based i)
///     [sim]      dt, t_end, model, seed, perturbation, record_stride,
///                initial_angles, settle_tol, settle_window,
///                divergence_threshold, desync_growth, desync_floor
///
/// Values may carry a unit suffix (`311 V`, `4 kW`, `50 Hz`); frequencies
/// must. `#` and `;` start comments.
Scenario parse_scenario(std::string_view text);

/// Writes a scenario that parse_scenario reads back to an equal value.
std::string format_scenario(const Scenario& scenario);

/// Reference presets. `index` is 1, 2 or 3 (M = 5.8, 6.2, 7.0).
Scenario preset_scenario(int index);

/// The module voltage as listed (three digits) for a preset (rounded, display only).
double preset_table_voltage(int index);

} // namespace cascade
