#include "cascade/phasor.hpp"

#include "cascade/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cascade {

double wrap_angle(double radians) noexcept {
    double r = std::remainder(radians, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) {
        r += 2.0 * std::numbers::pi;
    }
    return r;
}

Phasor::Phasor(double magnitude, double angle) {
    if (!std::isfinite(magnitude) || !std::isfinite(angle)) {
        throw InvalidInput("phasor components must be finite");
    }
    if (magnitude < 0.0) {
        throw InvalidInput("phasor magnitude must be non-negative, got " + std::to_string(magnitude));
    }
    magnitude_ = magnitude;
    angle_ = magnitude == 0.0 ? 0.0 : wrap_angle(angle);
}

Phasor Phasor::from_complex(Complex z) noexcept {
    Phasor p;
    p.magnitude_ = std::abs(z);
    p.angle_ = p.magnitude_ == 0.0 ? 0.0 : wrap_angle(std::arg(z));
    return p;
}

LineImpedance::LineImpedance(double resistance, double reactance)
    : resistance_(resistance), reactance_(reactance) {
    if (!(resistance >= 0.0) || !std::isfinite(resistance)) {
        throw InvalidInput("line resistance must be finite and >= 0");
    }
    if (!(reactance > 0.0) || !std::isfinite(reactance)) {
        throw InvalidInput("line reactance must be finite and > 0");
    }
}

double LineImpedance::magnitude() const noexcept { return std::hypot(resistance_, reactance_); }

double LineImpedance::angle() const noexcept { return std::atan2(reactance_, resistance_); }

PowerSample PowerSample::from_pq(double p, double q) noexcept {
    PowerSample s;
    s.active = p;
    s.reactive = q;
    s.apparent = std::hypot(p, q);
    s.power_factor = s.apparent > 0.0 ? std::abs(p) / s.apparent : 1.0;
    return s;
}

namespace {

Complex string_sum(std::span<const Phasor> module_voltages) {
    Complex sum{0.0, 0.0};
    for (const auto& v : module_voltages) {
        sum += v.to_complex();
    }
    return sum;
}

void check_index(std::size_t index, std::size_t count) {
    if (index >= count) {
        throw InvalidInput("module index " + std::to_string(index) + " out of range for " +
                           std::to_string(count) + " modules");
    }
}

void check_z_magnitude(double z_magnitude) {
    if (!(z_magnitude > 0.0) || !std::isfinite(z_magnitude)) {
        throw InvalidInput("impedance magnitude must be finite and > 0");
    }
}

} // namespace

Phasor pcc_voltage(std::span<const Phasor> module_voltages) {
    if (module_voltages.empty()) {
        throw InvalidInput("pcc_voltage needs at least one module voltage");
    }
    return Phasor::from_complex(string_sum(module_voltages));
}

Phasor line_current(const Phasor& pcc, const Phasor& grid, const LineImpedance& line) {
    if (!(line.magnitude() > 0.0)) {
        throw InvalidInput("line impedance must be nonzero");
    }
    return Phasor::from_complex((pcc.to_complex() - grid.to_complex()) / line.to_complex());
}

PowerSample module_power_exact(std::size_t module_index, std::span<const Phasor> module_voltages,
                               const Phasor& grid, const LineImpedance& line) {
    check_index(module_index, module_voltages.size());
    const Complex current = (string_sum(module_voltages) - grid.to_complex()) / line.to_complex();
    const Complex s = module_voltages[module_index].to_complex() * std::conj(current);
    return PowerSample::from_pq(s.real(), s.imag());
}

PowerSample module_power_inductive(std::size_t module_index, std::span<const Phasor> module_voltages,
                                   const Phasor& grid, double z_magnitude) {
    check_index(module_index, module_voltages.size());
    check_z_magnitude(z_magnitude);
    const double vi = module_voltages[module_index].magnitude();
    const double di = module_voltages[module_index].angle();
    const double dg = grid.angle();
    double sin_sum = 0.0;
    double cos_sum = 0.0;
    for (const auto& vj : module_voltages) {
        sin_sum += vj.magnitude() * std::sin(di - vj.angle());
        cos_sum += vj.magnitude() * std::cos(di - vj.angle());
    }
    const double scale = vi / z_magnitude;
    const double p = scale * (grid.magnitude() * std::sin(di - dg) - sin_sum);
    const double q = scale * (cos_sum - grid.magnitude() * std::cos(di - dg));
    return PowerSample::from_pq(p, q);
}

std::vector<PowerSample> string_power_exact(std::span<const Phasor> module_voltages, const Phasor& grid,
                                            const LineImpedance& line) {
    if (module_voltages.empty()) {
        throw InvalidInput("string_power_exact needs at least one module voltage");
    }
    const Complex conj_current =
        std::conj((string_sum(module_voltages) - grid.to_complex()) / line.to_complex());
    std::vector<PowerSample> out;
    out.reserve(module_voltages.size());
    for (const auto& v : module_voltages) {
        const Complex s = v.to_complex() * conj_current;
        out.push_back(PowerSample::from_pq(s.real(), s.imag()));
    }
    return out;
}

std::vector<PowerSample> string_power_inductive(std::span<const Phasor> module_voltages,
                                                const Phasor& grid, double z_magnitude) {
    if (module_voltages.empty()) {
        throw InvalidInput("string_power_inductive needs at least one module voltage");
    }
    check_z_magnitude(z_magnitude);
    // Same as the exact form with Z replaced by j|Z|.
    const Complex drive = std::conj(string_sum(module_voltages) - grid.to_complex());
    std::vector<PowerSample> out;
    out.reserve(module_voltages.size());
    for (const auto& v : module_voltages) {
        const Complex w = v.to_complex() * drive;
        out.push_back(PowerSample::from_pq(-w.imag() / z_magnitude, w.real() / z_magnitude));
    }
    return out;
}

} // namespace cascade
