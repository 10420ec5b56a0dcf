#include "cascade/stability.hpp"

#include "cascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace cascade {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Stable:
        return "stable";
    case Verdict::Marginal:
        return "marginal";
    case Verdict::Unstable:
        return "unstable";
    }
    return "unknown";
}

namespace {

void require_homogeneous(const SystemConfig& config, const char* what) {
    if (!config.homogeneous()) {
        throw HeterogeneousConfig(std::string(what) +
                                  " assumes identical modules; use analyze_numeric for per-module parameters");
    }
}

} // namespace

double transfer_capacity(const SystemConfig& config, double z_magnitude) {
    if (!(z_magnitude > 0.0) || !(config.voltage_ratio > 0.0)) {
        throw InvalidConfig("transfer capacity needs |Z| > 0 and M > 0");
    }
    return config.grid_voltage * config.grid_voltage / (config.voltage_ratio * z_magnitude);
}

std::pair<double, double> equilibrium_angles(double rated_power, double capacity) {
    if (!(capacity > 0.0)) {
        throw InvalidConfig("transfer capacity must be > 0");
    }
    const double ratio = rated_power / capacity;
    if (std::abs(ratio) > 1.0) {
        throw NoEquilibrium("rated power " + std::to_string(rated_power) + " W exceeds transfer capacity " +
                            std::to_string(capacity) + " W");
    }
    const double principal = std::asin(ratio);
    return {principal, std::numbers::pi - principal};
}

double stability_margin(const SystemConfig& config, double power_angle) {
    return config.voltage_ratio * std::cos(power_angle) - static_cast<double>(config.module_count);
}

Verdict verdict_from_margin(double margin) noexcept {
    if (margin > 0.0) return Verdict::Stable;
    if (margin < 0.0) return Verdict::Unstable;
    return Verdict::Marginal;
}

namespace {

// A single module has no differential modes; only the common mode -k' M cos d remains.
Verdict verdict_at(const SystemConfig& config, double power_angle) {
    if (config.module_count == 1) return verdict_from_margin(config.voltage_ratio * std::cos(power_angle));
    return verdict_from_margin(stability_margin(config, power_angle));
}

} // namespace

std::pair<Equilibrium, Equilibrium> equilibria(const SystemConfig& config) {
    require_homogeneous(config, "closed-form equilibrium");
    config.validate();
    const double capacity = transfer_capacity(config, config.z_magnitude());
    const auto [principal, reflected] = equilibrium_angles(config.rated_power, capacity);
    const double pcc = static_cast<double>(config.module_count) * config.module_voltage();
    auto make = [&](double angle, Branch branch) {
        return Equilibrium{angle, branch, wrap_angle(config.grid_angle + angle), pcc,
                           verdict_at(config, angle) == Verdict::Stable};
    };
    return {make(principal, Branch::Principal), make(reflected, Branch::Reflected)};
}

Equilibrium equilibrium_exact(const SystemConfig& config) {
    require_homogeneous(config, "symmetric exact equilibrium");
    config.validate();
    const std::size_t n = config.module_count;
    const double v_star = config.module_voltage();
    const double r = config.line.resistance();
    const double x = config.line.reactance();
    const double z2 = r * r + x * x;
    const Phasor grid{config.grid_voltage, 0.0};

    auto mismatch = [&](double delta) {
        const std::vector<Phasor> modules(n, Phasor{v_star, delta});
        return module_power_exact(0, modules, grid, config.line).active - config.rated_power;
    };
    auto slope = [&](double delta) {
        return v_star * config.grid_voltage * (r * std::sin(delta) + x * std::cos(delta)) / z2;
    };

    double lo = 0.0;
    double hi = std::numbers::pi / 2;
    double f_lo = mismatch(lo);
    const double f_hi = mismatch(hi);
    if (f_lo * f_hi > 0.0) {
        throw NoEquilibrium("exact-model power has no crossing of P* = " + std::to_string(config.rated_power) +
                            " W on [0, pi/2]");
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = mismatch(mid);
        if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    double delta = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double d = slope(delta);
        if (d == 0.0) break;
        const double step = mismatch(delta) / d;
        delta = std::clamp(delta - step, lo - 1e-6, hi + 1e-6);
        if (std::abs(step) < 1e-12) break;
    }
    if (!(std::abs(mismatch(delta)) < 1e-8 * std::max(1.0, std::abs(config.rated_power)))) {
        throw NoEquilibrium("exact-model equilibrium refinement did not converge");
    }
    return Equilibrium{delta, Branch::Principal, wrap_angle(config.grid_angle + delta),
                       static_cast<double>(n) * v_star, stability_margin(config, delta) > 0.0};
}

double steady_reactive(const SystemConfig& config, double capacity, double power_angle) {
    return capacity * (static_cast<double>(config.module_count) / config.voltage_ratio - std::cos(power_angle));
}

double coupling_gain(const SystemConfig& config) {
    const double v_star = config.module_voltage();
    return config.droop_gain * v_star * v_star / config.z_magnitude();
}

Matrix jacobian(const SystemConfig& config, double power_angle) {
    require_homogeneous(config, "closed-form Jacobian");
    const std::size_t n = config.module_count;
    const double gain = coupling_gain(config);
    const double margin = stability_margin(config, power_angle);
    Matrix a(n, n, -gain);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = -gain * (margin + 1.0);
    }
    return a;
}

Matrix finite_difference_jacobian(const Scenario& scenario, std::span<const double> angles, double h) {
    const std::size_t n = angles.size();
    Matrix j(n, n);
    std::vector<double> probe(angles.begin(), angles.end());
    for (std::size_t col = 0; col < n; ++col) {
        probe[col] = angles[col] + h;
        const auto up = rhs(SimState{0.0, probe}, scenario);
        probe[col] = angles[col] - h;
        const auto down = rhs(SimState{0.0, probe}, scenario);
        probe[col] = angles[col];
        for (std::size_t row = 0; row < n; ++row) {
            j(row, col) = (up[row] - down[row]) / (2.0 * h);
        }
    }
    return j;
}

std::vector<double> analytic_eigenvalues(const SystemConfig& config, double power_angle) {
    require_homogeneous(config, "closed-form eigenvalues");
    const double gain = coupling_gain(config);
    const double m_cos = config.voltage_ratio * std::cos(power_angle);
    std::vector<double> eig;
    eig.reserve(config.module_count);
    eig.push_back(-gain * m_cos);
    for (std::size_t i = 1; i < config.module_count; ++i) {
        eig.push_back(-gain * (m_cos - static_cast<double>(config.module_count)));
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

StabilityReport analyze(const SystemConfig& config) {
    require_homogeneous(config, "closed-form analysis");
    config.validate();
    StabilityReport rep;
    rep.transfer_capacity = transfer_capacity(config, config.z_magnitude());
    std::tie(rep.power_angle, rep.reflected_angle) = equilibrium_angles(config.rated_power, rep.transfer_capacity);
    rep.margin = stability_margin(config, rep.power_angle);
    rep.gain = coupling_gain(config);
    rep.eigenvalues = analytic_eigenvalues(config, rep.power_angle);
    rep.numeric_eigenvalues = numeric_eigenvalues(jacobian(config, rep.power_angle));
    rep.predicted_reactive = steady_reactive(config, rep.transfer_capacity, rep.power_angle);
    rep.predicted_power_factor = PowerSample::from_pq(config.rated_power, rep.predicted_reactive).power_factor;
    rep.verdict = verdict_at(config, rep.power_angle);
    return rep;
}

NumericLinearization analyze_numeric(const Scenario& scenario) {
    scenario.validate();
    const SystemConfig& config = scenario.config;
    const std::size_t n = config.module_count;

    // Start from the closed-form angle of the averaged string.
    double mean_ratio = 0.0;
    double mean_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_ratio += config.module(i).voltage_ratio / static_cast<double>(n);
        mean_power += config.module(i).rated_power / static_cast<double>(n);
    }
    const double capacity = config.grid_voltage * config.grid_voltage / (mean_ratio * config.z_magnitude());
    const double guess = std::asin(std::clamp(mean_power / capacity, -1.0, 1.0));

    NumericLinearization out;
    out.angles.assign(n, guess);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const auto f = rhs(SimState{0.0, out.angles}, scenario);
        double worst = 0.0;
        for (double v : f) worst = std::max(worst, std::abs(v));
        if (worst < 1e-11) {
            converged = true;
            break;
        }
        std::vector<double> neg(f.size());
        std::transform(f.begin(), f.end(), neg.begin(), [](double v) { return -v; });
        std::vector<double> step;
        try {
            step = solve(finite_difference_jacobian(scenario, out.angles), neg);
        } catch (const InvalidInput&) {
            break;
        }
        double largest = 0.0;
        for (double s : step) largest = std::max(largest, std::abs(s));
        const double damp = largest > 0.2 ? 0.2 / largest : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.angles[i] += damp * step[i];
    }
    if (!converged) {
        throw NoEquilibrium("Newton iteration found no equilibrium near the averaged operating point");
    }

    out.jacobian = finite_difference_jacobian(scenario, out.angles);
    Matrix similar(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            similar(i, j) = out.jacobian(i, j) *
                            std::sqrt(config.module(j).droop_gain / config.module(i).droop_gain);
        }
    }
    const double norm = similar.frobenius_norm();
    if (similar.asymmetry() > 1e-6 * std::max(1.0, norm)) {
        throw InvalidInput("linearization is not symmetrizable; the Jacobi solver needs the lossless-line model");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            similar(i, j) = similar(j, i) = 0.5 * (similar(i, j) + similar(j, i));
        }
    }
    out.eigenvalues = numeric_eigenvalues(similar);
    const double top = out.eigenvalues.back();
    const double tol = 1e-7 * std::max(1.0, norm);
    out.verdict = top < -tol ? Verdict::Stable : (top > tol ? Verdict::Unstable : Verdict::Marginal);
    return out;
}

} // namespace cascade
