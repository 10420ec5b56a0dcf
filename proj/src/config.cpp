#include "cascade/config.hpp"

#include "cascade/errors.hpp"

#include <cmath>
#include <string>

namespace cascade {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

void SystemConfig::validate() const {
    if (!positive(grid_voltage)) {
        throw InvalidConfig("grid voltage must be > 0");
    }
    if (!std::isfinite(grid_angle)) {
        throw InvalidConfig("grid angle must be finite");
    }
    if (!positive(nominal_frequency)) {
        throw InvalidConfig("nominal frequency must be > 0");
    }
    if (module_count < 1) {
        throw InvalidConfig("module count N must be >= 1");
    }
    if (!positive(voltage_ratio)) {
        throw InvalidConfig("voltage ratio M must be > 0");
    }
    if (!std::isfinite(rated_power)) {
        throw InvalidConfig("rated power must be finite");
    }
    if (!positive(droop_gain)) {
        throw InvalidConfig("droop gain k must be > 0");
    }
    if (!module_overrides.empty()) {
        if (module_overrides.size() != module_count) {
            throw InvalidConfig("per-module overrides list " + std::to_string(module_overrides.size()) +
                                " entries for " + std::to_string(module_count) + " modules");
        }
        for (const auto& m : module_overrides) {
            if (!positive(m.voltage_ratio) || !positive(m.droop_gain) || !std::isfinite(m.rated_power)) {
                throw InvalidConfig("per-module override needs M > 0, k > 0 and finite P*");
            }
        }
    }
}

double SystemConfig::module_voltage() const {
    if (!positive(voltage_ratio)) {
        throw InvalidConfig("voltage ratio M must be > 0");
    }
    return grid_voltage / voltage_ratio;
}

double SystemConfig::z_magnitude() const noexcept {
    return z_mode == ZMagnitudeMode::Full ? line.magnitude() : line.reactance();
}

bool SystemConfig::homogeneous() const noexcept {
    for (const auto& m : module_overrides) {
        if (m != ModuleParams{rated_power, droop_gain, voltage_ratio}) {
            return false;
        }
    }
    return true;
}

ModuleParams SystemConfig::module(std::size_t index) const {
    if (module_overrides.empty()) {
        return {rated_power, droop_gain, voltage_ratio};
    }
    return module_overrides.at(index);
}

double SystemConfig::module_voltage(std::size_t index) const {
    return grid_voltage / module(index).voltage_ratio;
}

} // namespace cascade
