#pragma once

#include "cascade/config.hpp"
#include "cascade/droop.hpp"
#include "cascade/linalg.hpp"

#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace cascade {

enum class Branch { Principal, Reflected };

enum class Verdict { Stable, Marginal, Unstable };

std::string_view to_string(Verdict v) noexcept;

/// Symmetric operating point: every module at the same angle.
struct Equilibrium {
    double power_angle = 0.0;  // PCC angle minus grid angle, rad
    Branch branch = Branch::Principal;
    double module_angle = 0.0; // absolute, grid angle included
    double pcc_voltage = 0.0;  // N * V*
    bool feasible = false;     // stability margin > 0
};

struct StabilityReport {
    double transfer_capacity = 0.0; // W
    double power_angle = 0.0;       // principal branch, rad
    double reflected_angle = 0.0;
    double margin = 0.0;
    double gain = 0.0; // k' = k V*^2 / |Z|, 1/s
    std::vector<double> eigenvalues;         // closed form, ascending
    std::vector<double> numeric_eigenvalues; // Jacobi on the closed-form matrix
    double predicted_reactive = 0.0;         // var
    double predicted_power_factor = 1.0;
    Verdict verdict = Verdict::Unstable;
};

/// S_C = V_g^2 / (M |Z|).
double transfer_capacity(const SystemConfig& config, double z_magnitude);

/// {arcsin(P*/S_C), pi - arcsin(P*/S_C)}; NoEquilibrium when |P*| > S_C.
std::pair<double, double> equilibrium_angles(double rated_power, double capacity);

/// Both symmetric equilibria of a homogeneous config under the lossless-line
/// model.
std::pair<Equilibrium, Equilibrium> equilibria(const SystemConfig& config);

/// Symmetric equilibrium of the full complex-impedance model, found by
/// bisection on [0, pi/2] followed by Newton refinement.
Equilibrium equilibrium_exact(const SystemConfig& config);

/// Q = S_C (N/M - cos delta).
double steady_reactive(const SystemConfig& config, double capacity, double power_angle);

/// k' = k V*^2 / |Z|.
double coupling_gain(const SystemConfig& config);

/// A = -k' ((M cos d - N) I + 1 1^T).
Matrix jacobian(const SystemConfig& config, double power_angle);

/// Central-difference Jacobian of the droop right-hand side at `angles`.
Matrix finite_difference_jacobian(const Scenario& scenario, std::span<const double> angles, double h = 1e-6);

/// {-k' M cos d} and N-1 copies of {-k' (M cos d - N)}, ascending.
std::vector<double> analytic_eigenvalues(const SystemConfig& config, double power_angle);

/// Delta = M cos d - N.
double stability_margin(const SystemConfig& config, double power_angle);

Verdict verdict_from_margin(double margin) noexcept;

/// Closed-form report at the principal equilibrium. Throws
/// HeterogeneousConfig for configs with per-module overrides and
/// NoEquilibrium when P* exceeds the transfer capacity.
StabilityReport analyze(const SystemConfig& config);

/// Linearization found without closed forms; works for heterogeneous strings.
struct NumericLinearization {
    std::vector<double> angles; // equilibrium, grid-relative
    Matrix jacobian;            // finite differences
    std::vector<double> eigenvalues;
    Verdict verdict = Verdict::Unstable;
};

/// Newton solve of P_i(delta) = P*_i for all i, then eigenvalues of the
/// finite-difference Jacobian. The Jacobian is -K H with K = diag(k_i); for
/// the lossless-line model H is symmetric, so the eigenvalues are taken from
/// the similar matrix -K^1/2 H K^1/2 with the Jacobi solver. The exact model
/// with R > 0 yields a non-symmetric H and is rejected.
NumericLinearization analyze_numeric(const Scenario& scenario);

} // namespace cascade
