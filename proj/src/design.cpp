#include "cascade/design.hpp"

#include "cascade/errors.hpp"

#include <cmath>
#include <limits>

namespace cascade {

void DesignConstraints::validate() const {
    if (!(min_power_factor >= 0.0 && min_power_factor <= 1.0)) {
        throw InvalidConfig("min power factor must lie in [0, 1]");
    }
    if (!(min_margin > 0.0)) {
        throw InvalidConfig("min margin must be > 0");
    }
    if (!(ratio_low > 0.0) || !(ratio_low < ratio_high)) {
        throw InvalidConfig("M range needs 0 < low < high");
    }
    if (!(ratio_step > 0.0)) {
        throw InvalidConfig("M step must be > 0");
    }
}

DesignRow design_row(const SystemConfig& config, double voltage_ratio) {
    SystemConfig candidate = config;
    candidate.voltage_ratio = voltage_ratio;

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    DesignRow row;
    row.voltage_ratio = voltage_ratio;
    row.module_voltage = candidate.module_voltage();
    StabilityReport rep;
    try {
        rep = analyze(candidate);
    } catch (const NoEquilibrium&) {
        row.feasible = false;
        row.power_angle = row.margin = row.slow_eigenvalue = row.reactive = row.power_factor = nan;
        row.settling_estimate = std::numeric_limits<double>::infinity();
        return row;
    }
    row.feasible = true;
    row.power_angle = rep.power_angle;
    row.margin = rep.margin;
    row.slow_eigenvalue = rep.eigenvalues.back();
    row.verdict = rep.verdict;
    row.settling_estimate = row.verdict == Verdict::Stable ? 4.0 / std::abs(row.slow_eigenvalue)
                                                           : std::numeric_limits<double>::infinity();
    row.reactive = rep.predicted_reactive;
    row.power_factor = rep.predicted_power_factor;
    return row;
}

std::vector<DesignRow> sweep_voltage_ratio(const SystemConfig& config, double low, double high, double step) {
    if (!(step > 0.0) || !(low > 0.0) || !(low <= high)) {
        throw InvalidConfig("sweep needs 0 < low <= high and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((high - low) / step + 1e-9)) + 1;
    std::vector<DesignRow> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        rows.push_back(design_row(config, low + static_cast<double>(i) * step));
    }
    return rows;
}

Recommendation recommend_voltage_ratio(const SystemConfig& config, const DesignConstraints& constraints) {
    constraints.validate();
    const auto rows =
        sweep_voltage_ratio(config, constraints.ratio_low, constraints.ratio_high, constraints.ratio_step);

    Recommendation out;
    bool any_stable = false;
    bool any_margin = false;
    for (const auto& row : rows) {
        if (!row.feasible || row.verdict != Verdict::Stable) continue;
        any_stable = true;
        if (row.margin < constraints.min_margin) continue;
        any_margin = true;
        if (row.power_factor < constraints.min_power_factor) continue;
        if (!out.row || row.power_factor > out.row->power_factor ||
            (row.power_factor == out.row->power_factor && row.margin > out.row->margin)) {
            out.row = row;
        }
    }
    if (!out.row) {
        if (!any_stable) {
            out.binding_constraint = "stability: no stable M in range";
        } else if (!any_margin) {
            out.binding_constraint = "min_margin: no stable M reaches the margin floor";
        } else {
            out.binding_constraint = "min_power_factor: rows meeting the margin floor fall below the power factor floor";
        }
    }
    return out;
}

} // namespace cascade
