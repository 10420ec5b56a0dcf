#pragma once

#include "cascade/config.hpp"
#include "cascade/stability.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cascade {

/// One voltage-ratio candidate. When `feasible` is false the rated power
/// exceeds the transfer capacity and only `voltage_ratio` and
/// `module_voltage` carry data; the rest are NaN.
struct DesignRow {
    double voltage_ratio = 0.0;
    double module_voltage = 0.0;
    bool feasible = false;
    double power_angle = 0.0;
    double margin = 0.0;
    double slow_eigenvalue = 0.0;   // largest closed-form eigenvalue, 1/s
    double settling_estimate = 0.0; // 4 / |slow eigenvalue| if stable, else inf
    double reactive = 0.0;
    double power_factor = 0.0;
    Verdict verdict = Verdict::Unstable;
};

struct DesignConstraints {
    double min_power_factor = 0.95;
    double min_margin = 0.1;
    double ratio_low = 5.0;
    double ratio_high = 8.0;
    double ratio_step = 0.05;

    void validate() const;
};

/// Evaluates one candidate M against `config` (whose own M is ignored).
DesignRow design_row(const SystemConfig& config, double voltage_ratio);

/// Candidates low, low + step, ... up to high inclusive.
std::vector<DesignRow> sweep_voltage_ratio(const SystemConfig& config, double low, double high, double step);

struct Recommendation {
    std::optional<DesignRow> row;
    /// Set when no row qualifies: the constraint that empties the candidate set.
    std::string binding_constraint;
};

/// Highest power factor among stable rows meeting both floors; ties go to
/// the larger margin.
Recommendation recommend_voltage_ratio(const SystemConfig& config, const DesignConstraints& constraints);

} // namespace cascade
