#pragma once

namespace thermoflow {

/// One classical fourth-order Runge-Kutta step for a scalar ODE y' = f(t, y).
/// `mean_slope`, when non-null, receives (k1 + 2k2 + 2k3 + k4) / 6.
template <class F>
[[nodiscard]] double rk4_step(F&& f, double t, double y, double h, double* mean_slope = nullptr) {
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(t + h, y + h * k3);
    const double slope = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (mean_slope != nullptr) {
        *mean_slope = slope;
    }
    return y + h * slope;
}

}  // namespace thermoflow
