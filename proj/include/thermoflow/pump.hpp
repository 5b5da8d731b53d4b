#pragma once

namespace thermoflow {

/// Electric water pump: PT1 lag 1/(tau_p s + 1) inside a flow saturation box.
struct PumpParams {
    double tau_p = 0.2;                      ///< s
    double mdot_min = 0.25;                  ///< kg/s
    double mdot_max = 4.5;                   ///< kg/s
    double f_max = 5.0;                      ///< Hz, reported only; the lag sets the roll-off
    double hydraulic_coeff = 500.0 / 91.125; ///< W s^3/kg^3, 500 W at 4.5 kg/s

    void validate() const;

    [[nodiscard]] double clamp(double mdot) const;
    [[nodiscard]] double mid_flow() const { return 0.5 * (mdot_min + mdot_max); }
};

struct PumpState {
    double mdot_actual = 0.25;  ///< kg/s
};

/// Clamp the command, advance the lag with the exact discretization factor
/// 1 - exp(-dt/tau_p), clamp the state. Requires 0 < dt <= tau_p / 10.
[[nodiscard]] PumpState pump_step(const PumpState& state, double mdot_command, double dt, const PumpParams& params);

/// Hydraulic power for a cubic pump curve, coeff * mdot^3.
[[nodiscard]] double hydraulic_power(double mdot_actual, double coeff);

/// |G_p(j 2 pi f)| = 1 / sqrt(1 + (2 pi f tau_p)^2).
[[nodiscard]] double pump_gain(double frequency_hz, const PumpParams& params);

}  // namespace thermoflow
