#pragma once

#include "cascade/design.hpp"
#include "cascade/droop.hpp"
#include "cascade/stability.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cascade {

/// Header plus one row per sample:
/// t, delta_1..N [rad], P_1..N [W], Q_1..N [var], f_1..N [Hz], pf_1..N,
/// nine significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

std::string_view to_string(Outcome::Kind kind) noexcept;

struct RunReport {
    std::string scenario_text; // format_scenario of the resolved input
    std::optional<StabilityReport> stability;
    std::string stability_error; // why `stability` is empty
    Outcome outcome;
    std::vector<std::filesystem::path> files;
    std::string text;
};

/// Simulates, writes the CSV to `csv_path` (skipped when empty) and a text
/// report next to it as `<stem>.report.txt`.
RunReport run_simulate(const Scenario& scenario, const std::filesystem::path& csv_path);

/// Report text for a finished run; exposed so callers can re-render.
std::string format_run_report(const Scenario& scenario, const Trajectory& trajectory,
                              const std::optional<StabilityReport>& stability);

struct AnalyzeResult {
    StabilityReport report;
    std::string text;
    std::string json;
};

/// Closed-form stability report for homogeneous strings. Throws
/// NoEquilibrium / HeterogeneousConfig like analyze().
AnalyzeResult run_analyze(const Scenario& scenario);

/// Power factor the reference simulation reports for the case-2 preset.
inline constexpr double kReferenceCase2PowerFactor = 0.983;

struct SweepResult {
    std::vector<DesignRow> rows;
    Recommendation recommendation;
    std::string recommendation_line;
};

void write_design_csv(std::ostream& out, const std::vector<DesignRow>& rows);

/// Writes the design table CSV to `csv_path` (skipped when empty).
SweepResult run_sweep(const Scenario& scenario, const DesignConstraints& constraints,
                      const std::filesystem::path& csv_path);

} // namespace cascade
