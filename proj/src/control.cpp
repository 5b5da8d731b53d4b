#include "thermoflow/control.hpp"

#include "thermoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermoflow {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::mechanical: return "mechanical";
        case Strategy::feedforward: return "feedforward";
        case Strategy::pid: return "pid";
        case Strategy::combined: return "combined";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "mechanical") return Strategy::mechanical;
    if (name == "feedforward") return Strategy::feedforward;
    if (name == "pid") return Strategy::pid;
    if (name == "combined") return Strategy::combined;
    throw ConfigError("unknown strategy '" + std::string(name) +
                      "' (expected mechanical | feedforward | pid | combined)");
}

std::optional<SeriesPidForm> to_series_form(const PidGains& gains) {
    if (gains.k_i == 0.0) {
        return std::nullopt;
    }
    const double sum = gains.k_p / gains.k_i;
    const double product = gains.k_d / gains.k_i;
    const double disc = sum * sum - 4.0 * product;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    // Pick the larger-magnitude root first, recover the other from the product.
    const double t_r1 = 0.5 * (sum + std::copysign(root, sum));
    const double t_r2 = t_r1 != 0.0 ? product / t_r1 : 0.0;
    return SeriesPidForm{gains.k_i, t_r1, t_r2};
}

PidGains from_series_form(const SeriesPidForm& form) {
    return {form.k_i * (form.t_r1 + form.t_r2), form.k_i, form.k_i * form.t_r1 * form.t_r2};
}

PidGains pid_preset(std::string_view name) {
    if (name == "reference") return {-1.4, -0.05, -1.0};
    if (name == "integral_heavy") return {-1.4, -0.1, 0.0};
    throw ConfigError("unknown PID preset '" + std::string(name) + "'");
}

void TargetSchedule::validate(const ThermalPlantParams& plant) const {
    for (const double t : {fired, coasting}) {
        if (!(t > plant.t_w_in) || t > 600.0) {
            throw ConfigError("target temperature " + std::to_string(t) + " K outside (T_w_in, 600 K]");
        }
    }
}

double target_for(const EngineSample& sample, const TargetSchedule& schedule) {
    return sample.fired ? schedule.fired : schedule.coasting;
}

PidOutput pid_step(const ControllerState& state, double error, double dt, const PidGains& gains,
                   const PidLimits& limits) {
    ControllerState next = state;

    const double raw_derivative = state.primed ? (error - state.previous_error) / dt : 0.0;
    const double blend =
        limits.derivative_filter_time > 0.0 ? -std::expm1(-dt / limits.derivative_filter_time) : 1.0;
    next.derivative += blend * (raw_derivative - next.derivative);
    next.previous_error = error;
    next.primed = true;

    const double candidate = state.integral + error * dt;
    const double unsaturated =
        limits.base_flow + gains.k_p * error + gains.k_i * candidate + gains.k_d * next.derivative;
    const double push = gains.k_i * error;
    const bool winding_up = (unsaturated > limits.flow_max && push > 0.0) ||
                            (unsaturated < limits.flow_min && push < 0.0);
    if (!winding_up) {
        next.integral = candidate;
    }
    if (gains.k_i != 0.0) {
        const double cap = (limits.flow_max - limits.flow_min) / std::abs(gains.k_i);
        next.integral = std::clamp(next.integral, -cap, cap);
    }

    const double delta = gains.k_p * error + gains.k_i * next.integral + gains.k_d * next.derivative;
    return {delta, next};
}

double feed_forward_flow_raw(const EngineSample& sample, double target, const HeatInputModel& heat,
                             const ThermalPlantParams& plant) {
    if (!(target > plant.t_w_in)) {
        throw ConfigError("feed_forward_flow: target must exceed the inlet water temperature");
    }
    const double alpha_c = mean_alpha_c(sample, heat);
    const double t_mod = modified_gas_temperature(sample, heat);
    const double numerator = plant.chi * alpha_c * (t_mod - target);
    if (numerator <= 0.0) {
        return 0.0;
    }
    const double denominator =
        -(plant.alpha_ref / std::pow(plant.mdot_ref, plant.m_exp)) * (plant.t_w_in - target);
    return std::pow(numerator / denominator, 1.0 / plant.m_exp);
}

double feed_forward_flow(const EngineSample& sample, double target, const HeatInputModel& heat,
                         const ThermalPlantParams& plant, const PumpParams& pump) {
    return pump.clamp(feed_forward_flow_raw(sample, target, heat, plant));
}

double mechanical_pump_flow(const EngineSample& sample, double ratio, const PumpParams& pump) {
    return pump.clamp(ratio * sample.n);
}

void ControllerSpec::validate(const ThermalPlantParams& plant, const PumpParams& pump) const {
    if (strategy == Strategy::mechanical) {
        if (!(mechanical_ratio > 0.0)) {
            throw ConfigError("controller: mechanical_ratio must be positive");
        }
        return;
    }
    schedule.validate(plant);
    for (const double g : {gains.k_p, gains.k_i, gains.k_d}) {
        if (!std::isfinite(g)) {
            throw ConfigError("controller: gains must be finite");
        }
    }
    if (base_flow && (*base_flow < pump.mdot_min || *base_flow > pump.mdot_max)) {
        throw ConfigError("controller: base_flow outside the pump range");
    }
    if (derivative_filter_time && !(*derivative_filter_time >= 0.0)) {
        throw ConfigError("controller: derivative_filter_time must be non-negative");
    }
}

Controller::Controller(ControllerSpec spec, const ModelSetup& setup)
    : spec_(std::move(spec)),
      setup_(setup),
      base_flow_(spec_.base_flow.value_or(setup.pump.mid_flow())),
      filter_time_(spec_.derivative_filter_time.value_or(setup.pump.tau_p / 10.0)) {
    spec_.validate(setup.plant, setup.pump);
}

double Controller::nominal_flow(const EngineSample& sample) const {
    switch (spec_.strategy) {
        case Strategy::mechanical:
            return mechanical_pump_flow(sample, spec_.mechanical_ratio, setup_.pump);
        case Strategy::feedforward:
        case Strategy::combined:
            return feed_forward_flow(sample, target_for(sample, spec_.schedule), setup_.heat, setup_.plant,
                                     setup_.pump);
        case Strategy::pid:
            return base_flow_;
    }
    return base_flow_;
}

double Controller::initial_command(const EngineSample& sample) const {
    return setup_.pump.clamp(nominal_flow(sample));
}

double Controller::command(const EngineSample& sample, double t_cyl, double dt) {
    const double nominal = nominal_flow(sample);
    if (spec_.strategy == Strategy::mechanical || spec_.strategy == Strategy::feedforward) {
        return nominal;
    }
    const PidLimits limits{nominal, setup_.pump.mdot_min, setup_.pump.mdot_max, filter_time_};
    const double error = target_for(sample, spec_.schedule) - t_cyl;
    const PidOutput out = pid_step(state_, error, dt, spec_.gains, limits);
    state_ = out.state;
    return nominal + out.delta;
}

}  // namespace thermoflow
