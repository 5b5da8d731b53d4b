#include "thermoflow/plant.hpp"

#include "thermoflow/errors.hpp"
#include "thermoflow/integrate.hpp"

#include <cmath>
#include <string>

namespace thermoflow {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string("plant: ") + name + " must be positive and finite");
    }
}

}  // namespace

void ThermalPlantParams::validate() const {
    require_positive(c_v, "C_v");
    require_positive(rho, "rho");
    require_positive(dx, "dx");
    require_positive(chi, "chi");
    require_positive(alpha_ref, "alpha_ref");
    require_positive(mdot_ref, "mdot_ref");
    require_positive(m_exp, "m_exp");
    require_positive(t_w_in, "T_w_in");
    require_positive(c_p_w, "C_p_w");
    require_positive(wetted_area, "wetted_area");
    if (chi > 1.0) {
        throw ConfigError("plant: chi must not exceed 1");
    }
    if (m_exp >= 1.0) {
        throw ConfigError("plant: m_exp must lie in (0, 1)");
    }
}

double water_htc(double mdot_w, const ThermalPlantParams& params) {
    if (!(mdot_w > 0.0)) {
        throw DomainError("water_htc: mass flow must be positive");
    }
    return params.alpha_ref * std::pow(mdot_w / params.mdot_ref, params.m_exp);
}

double water_htc_slope(double mdot_w, const ThermalPlantParams& params) {
    if (!(mdot_w > 0.0)) {
        throw DomainError("water_htc_slope: mass flow must be positive");
    }
    return params.m_exp * params.alpha_ref * std::pow(mdot_w, params.m_exp - 1.0) /
           std::pow(params.mdot_ref, params.m_exp);
}

double plant_derivative(const PlantState& state, double alpha_c_mean, double t_mod,
                        const ThermalPlantParams& params) {
    const double alpha_w = water_htc(state.mdot_w, params);
    const double combustion = params.chi * alpha_c_mean * (t_mod - state.t_cyl);
    const double water = alpha_w * (state.t_w - state.t_cyl);
    return (combustion + water) / params.areal_heat_capacity();
}

double water_temperature(double q_dot, double mdot_w, const ThermalPlantParams& params) {
    if (!(mdot_w > 0.0)) {
        throw DomainError("water_temperature: mass flow must be positive");
    }
    return params.t_w_in + q_dot / (mdot_w * params.c_p_w);
}

double water_heat_flow(double t_cyl, double t_w, double mdot_w, const ThermalPlantParams& params) {
    return params.wetted_area * water_htc(mdot_w, params) * (t_cyl - t_w);
}

SteadyState steady_state(double alpha_c_mean, double t_mod, double mdot_w, const ThermalPlantParams& params) {
    if (alpha_c_mean < 0.0) {
        throw DomainError("steady_state: mean combustion HTC must be non-negative");
    }
    const double alpha_w = water_htc(mdot_w, params);
    const double source = params.chi * alpha_c_mean;

    SteadyState out;
    out.t_w = params.t_w_in;
    for (int i = 1; i <= 1000; ++i) {
        const double t_cyl = (source * t_mod + alpha_w * out.t_w) / (source + alpha_w);
        const double q_dot = params.wetted_area * alpha_w * (t_cyl - out.t_w);
        const double t_w = water_temperature(q_dot, mdot_w, params);
        const double change = std::abs(t_cyl - out.t_cyl);
        out.t_cyl = t_cyl;
        out.q_dot = q_dot;
        out.t_w = t_w;
        out.iterations = i;
        if (!std::isfinite(t_cyl)) {
            break;
        }
        if (change < 1e-9) {
            // t_w was refreshed after t_cyl; resync q_dot so the triple is consistent.
            out.q_dot = params.wetted_area * alpha_w * (out.t_cyl - out.t_w);
            return out;
        }
    }
    throw NumericalError("steady_state: fixed-point iteration did not converge in 1000 iterations");
}

PlantState plant_step(const PlantState& state, const StepInputs& inputs, double dt,
                      const ThermalPlantParams& params, double* net_flux_integral) {
    const double alpha_w = water_htc(inputs.mdot_w, params);
    const double t_w = water_temperature(state.q_dot, inputs.mdot_w, params);
    const double source = params.chi * inputs.alpha_c_mean;
    const double capacity = params.areal_heat_capacity();

    auto net_flux = [&](double t_cyl) { return source * (inputs.t_mod - t_cyl) + alpha_w * (t_w - t_cyl); };
    auto rhs = [&](double /*t*/, double t_cyl) { return net_flux(t_cyl) / capacity; };

    PlantState next;
    next.t = state.t + dt;
    next.t_cyl = rk4_step(rhs, state.t, state.t_cyl, dt);
    next.t_w = t_w;
    next.mdot_w = inputs.mdot_w;
    next.q_dot = params.wetted_area * alpha_w * (next.t_cyl - t_w);

    if (net_flux_integral != nullptr) {
        *net_flux_integral = 0.5 * dt * (net_flux(state.t_cyl) + net_flux(next.t_cyl));
    }
    return next;
}

}  // namespace thermoflow
