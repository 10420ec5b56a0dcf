#pragma once

#include <cstddef>
#include <vector>

namespace cascade {

/// One classical fourth-order Runge-Kutta step of dy/dt = f(t, y).
template <class Rhs>
std::vector<double> rk4_step(Rhs&& f, double t, const std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    std::vector<double> tmp(n);

    const std::vector<double> k1 = f(t, y);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = f(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    const std::vector<double> k4 = f(t + dt, tmp);

    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return next;
}

} // namespace cascade
