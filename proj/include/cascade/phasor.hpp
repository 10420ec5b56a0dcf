#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cascade {

using Complex = std::complex<double>;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians) noexcept;

/// Polar voltage or current quantity. Magnitude is never negative and the
/// angle always lies in (-pi, pi]; a zero phasor has angle 0.
class Phasor {
  public:
    Phasor() = default;
    Phasor(double magnitude, double angle);

    static Phasor from_complex(Complex z) noexcept;

    double magnitude() const noexcept { return magnitude_; }
    double angle() const noexcept { return angle_; }
    Complex to_complex() const noexcept { return std::polar(magnitude_, angle_); }

    friend bool operator==(const Phasor&, const Phasor&) = default;

  private:
    double magnitude_ = 0.0;
    double angle_ = 0.0;
};

/// Series line between the PCC and the grid.
class LineImpedance {
  public:
    LineImpedance(double resistance, double reactance);

    double resistance() const noexcept { return resistance_; }
    double reactance() const noexcept { return reactance_; }
    double magnitude() const noexcept;
    /// atan2(X, R), in (0, pi/2].
    double angle() const noexcept;
    Complex to_complex() const noexcept { return {resistance_, reactance_}; }

    friend bool operator==(const LineImpedance&, const LineImpedance&) = default;

  private:
    double resistance_;
    double reactance_;
};

struct PowerSample {
    double active = 0.0;   // W
    double reactive = 0.0; // var
    double apparent = 0.0; // VA
    double power_factor = 1.0;

    static PowerSample from_pq(double p, double q) noexcept;
};

Phasor pcc_voltage(std::span<const Phasor> module_voltages);

Phasor line_current(const Phasor& pcc, const Phasor& grid, const LineImpedance& line);

/// S_i = V_i * conj(I) with the full complex line impedance.
PowerSample module_power_exact(std::size_t module_index, std::span<const Phasor> module_voltages,
                               const Phasor& grid, const LineImpedance& line);

/// Lossless-line power transfer with an explicit impedance magnitude.
PowerSample module_power_inductive(std::size_t module_index, std::span<const Phasor> module_voltages,
                                   const Phasor& grid, double z_magnitude);

// Whole-string variants. Same results as calling the per-module functions for
// every index, computed in O(N).
std::vector<PowerSample> string_power_exact(std::span<const Phasor> module_voltages, const Phasor& grid,
                                            const LineImpedance& line);
std::vector<PowerSample> string_power_inductive(std::span<const Phasor> module_voltages,
                                                const Phasor& grid, double z_magnitude);

} // namespace cascade
