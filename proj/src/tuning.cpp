#include "thermoflow/tuning.hpp"

#include "thermoflow/errors.hpp"

#include <array>
#include <cmath>

namespace thermoflow {

LinearPlant linearize_plant(const OperatingPoint& op, const ThermalPlantParams& plant, const PumpParams& pump) {
    if (op.mdot_w0 < pump.mdot_min || op.mdot_w0 > pump.mdot_max) {
        throw ConfigError("linearize_plant: operating flow outside [mdot_min, mdot_max]");
    }
    const double alpha_w0 = water_htc(op.mdot_w0, plant);
    LinearPlant out;
    out.tau_e = plant.areal_heat_capacity() / alpha_w0;
    out.k_s_e = (op.t_w0 - op.t_cyl0) / alpha_w0 * water_htc_slope(op.mdot_w0, plant);
    return out;
}

KesslerTuning kessler_tune(double tau_e, double tau_p, double k_s_e, double tau_c_desired) {
    if (k_s_e == 0.0 || !std::isfinite(k_s_e)) {
        throw ConfigError("kessler_tune: degenerate plant (k_s_e = 0)");
    }
    if (!(tau_e > 0.0) || !(tau_p > 0.0) || !(tau_c_desired > 0.0)) {
        throw ConfigError("kessler_tune: time constants must be positive");
    }
    KesslerTuning out;
    out.t_r1 = tau_e;
    out.t_r2 = tau_p;
    out.tau_c = tau_c_desired;
    out.gains = from_series_form({1.0 / (k_s_e * tau_c_desired), tau_e, tau_p});
    return out;
}

LoopResponse simulate_linear_loop(const LinearLoop& loop, double reference_step, double disturbance,
                                  double duration, double dt) {
    const auto& [tau_e, k_s] = loop.plant;
    const auto& g = loop.gains;

    // x = {pump flow, engine temperature, error integral}
    using State = std::array<double, 3>;
    auto rhs = [&](const State& x) {
        const double temp_rate = (-x[1] + k_s * x[0] + disturbance) / tau_e;
        const double error = reference_step - x[1];
        const double u = g.k_p * error + g.k_i * x[2] - g.k_d * temp_rate;
        return State{(u - x[0]) / loop.tau_p, temp_rate, error};
    };
    auto axpy = [](const State& x, double h, const State& k) {
        return State{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]};
    };

    State x{g.k_d * reference_step / loop.tau_p, 0.0, 0.0};
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    LoopResponse out;
    out.t.reserve(steps + 1);
    out.y.reserve(steps + 1);
    out.flow.reserve(steps + 1);
    out.t.push_back(0.0);
    out.y.push_back(x[1]);
    out.flow.push_back(x[0]);
    for (std::size_t i = 1; i <= steps; ++i) {
        const State k1 = rhs(x);
        const State k2 = rhs(axpy(x, 0.5 * dt, k1));
        const State k3 = rhs(axpy(x, 0.5 * dt, k2));
        const State k4 = rhs(axpy(x, dt, k3));
        for (std::size_t j = 0; j < 3; ++j) {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        out.t.push_back(static_cast<double>(i) * dt);
        out.y.push_back(x[1]);
        out.flow.push_back(x[0]);
    }
    return out;
}

double time_to_fraction(const LoopResponse& response, double final_value, double fraction) {
    const double level = fraction * final_value;
    for (std::size_t i = 1; i < response.y.size(); ++i) {
        const double a = response.y[i - 1] - level;
        const double b = response.y[i] - level;
        if ((a < 0.0) != (b < 0.0) || b == 0.0) {
            const double w = a / (a - b);
            return response.t[i - 1] + w * (response.t[i] - response.t[i - 1]);
        }
    }
    return -1.0;
}

}  // namespace thermoflow
