#include "thermoflow/pump.hpp"

#include "thermoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thermoflow {

void PumpParams::validate() const {
    if (!(tau_p > 0.0)) {
        throw ConfigError("pump: tau_p must be positive");
    }
    if (!(mdot_min > 0.0) || !(mdot_max > mdot_min)) {
        throw ConfigError("pump: require 0 < mdot_min < mdot_max");
    }
    if (!(f_max > 0.0)) {
        throw ConfigError("pump: f_max must be positive");
    }
    if (!(hydraulic_coeff >= 0.0)) {
        throw ConfigError("pump: hydraulic_coeff must be non-negative");
    }
}

double PumpParams::clamp(double mdot) const {
    if (std::isnan(mdot)) {
        return mdot_min;
    }
    return std::clamp(mdot, mdot_min, mdot_max);
}

PumpState pump_step(const PumpState& state, double mdot_command, double dt, const PumpParams& params) {
    if (!(dt > 0.0) || dt > params.tau_p / 10.0) {
        throw ConfigError("pump_step: dt must lie in (0, tau_p/10]");
    }
    const double target = params.clamp(mdot_command);
    const double factor = -std::expm1(-dt / params.tau_p);
    return {params.clamp(state.mdot_actual + factor * (target - state.mdot_actual))};
}

double hydraulic_power(double mdot_actual, double coeff) {
    return coeff * mdot_actual * mdot_actual * mdot_actual;
}

double pump_gain(double frequency_hz, const PumpParams& params) {
    const double w_tau = 2.0 * std::numbers::pi * frequency_hz * params.tau_p;
    return 1.0 / std::sqrt(1.0 + w_tau * w_tau);
}

}  // namespace thermoflow
