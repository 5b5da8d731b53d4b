#pragma once

// First-estimate controller tuning: linearise the plant about an operating
// point into a PT1 (tau_e, k_s_e), then cancel the engine and pump time
// constants with the two PID zeros so that the open loop reduces to
// k_I k_s_e / s and the closed loop to a PT1 with tau_c = 1 / (k_I k_s_e).

#include "thermoflow/control.hpp"
#include "thermoflow/plant.hpp"
#include "thermoflow/pump.hpp"

#include <vector>

namespace thermoflow {

struct OperatingPoint {
    double t_w0 = 373.0;    ///< K
    double t_cyl0 = 419.0;  ///< K
    double mdot_w0 = 2.0;   ///< kg/s
};

struct LinearPlant {
    double tau_e = 0.0;  ///< s
    double k_s_e = 0.0;  ///< K s/kg, negative when T_w0 < T_cyl0
};

/// Throws ConfigError when mdot_w0 lies outside the pump box. The combustion
/// side and the water temperature rise are held fixed, as in the first estimate.
[[nodiscard]] LinearPlant linearize_plant(const OperatingPoint& op, const ThermalPlantParams& plant,
                                          const PumpParams& pump);

struct KesslerTuning {
    PidGains gains;
    double t_r1 = 0.0;   ///< s, cancels tau_e
    double t_r2 = 0.0;   ///< s, cancels tau_p
    double tau_c = 0.0;  ///< s, closed-loop time constant
};

/// Throws ConfigError when k_s_e == 0 or a time constant is not positive.
[[nodiscard]] KesslerTuning kessler_tune(double tau_e, double tau_p, double k_s_e, double tau_c_desired);

/// Linear cascade PID -> pump PT1 -> engine PT1 in deviation variables, with an
/// additive disturbance d at the engine input: tau_e T' = -T + k_s_e mdot + d.
struct LinearLoop {
    LinearPlant plant;
    double tau_p = 0.2;
    PidGains gains;
};

struct LoopResponse {
    std::vector<double> t;
    std::vector<double> y;     ///< engine temperature deviation, K
    std::vector<double> flow;  ///< pump output deviation, kg/s
};

/// Step response of the continuous loop to a reference step r and a constant
/// disturbance d applied at t = 0, integrated with RK4. The ideal derivative's
/// impulse on the reference step enters as an initial pump flow k_D r / tau_p.
[[nodiscard]] LoopResponse simulate_linear_loop(const LinearLoop& loop, double reference_step, double disturbance,
                                                double duration, double dt);

/// First time the response reaches `fraction` of `final_value`, by linear
/// interpolation between samples. Returns a negative value if never reached.
[[nodiscard]] double time_to_fraction(const LoopResponse& response, double final_value, double fraction);

}  // namespace thermoflow
