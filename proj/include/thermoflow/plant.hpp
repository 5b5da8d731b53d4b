#pragma once

// Lumped-capacity thermal model of the cylinder head.
//
//   C_v rho dx dT_cyl/dt = chi <alpha_c> (T_mod - T_cyl) + alpha_w (T_w - T_cyl)
//   alpha_w             = alpha_ref (mdot_w / mdot_ref)^m
//   T_w                 = T_w_in + Q_dot / (mdot_w C_p_w)
//
// The ODE is written per unit water-wetted area; Q_dot (watts) is the
// solid-to-water flux density times the wetted area A_w.

namespace thermoflow {

struct ThermalPlantParams {
    double c_v = 900.0;          ///< solid specific heat, J/(kg K)
    double rho = 2700.0;         ///< solid density, kg/m^3 (aluminium)
    double dx = 0.015;           ///< characteristic wall thickness, m
    double chi = 0.3;            ///< combustion-side to water-side surface ratio
    double alpha_ref = 1.0e4;    ///< water-side HTC at mdot_ref, W/(m^2 K)
    double mdot_ref = 2.0;       ///< reference water mass flow, kg/s
    double m_exp = 0.7;          ///< Reynolds exponent
    double t_w_in = 353.0;       ///< inlet water temperature, K
    double c_p_w = 4186.0;       ///< water specific heat, J/(kg K)
    double wetted_area = 0.11;   ///< water-wetted area A_w, m^2

    /// Heat capacity per wetted area, C_v rho dx, J/(m^2 K).
    [[nodiscard]] double areal_heat_capacity() const { return c_v * rho * dx; }

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

/// Instantaneous plant state. q_dot is total watts into the water.
struct PlantState {
    double t = 0.0;       ///< s
    double t_cyl = 0.0;   ///< K
    double t_w = 0.0;     ///< K
    double mdot_w = 0.0;  ///< kg/s
    double q_dot = 0.0;   ///< W
};

/// Water-jacket HTC power law. Throws DomainError for mdot_w <= 0.
[[nodiscard]] double water_htc(double mdot_w, const ThermalPlantParams& params);

/// d(alpha_w)/d(mdot_w), the slope of the power law.
[[nodiscard]] double water_htc_slope(double mdot_w, const ThermalPlantParams& params);

/// dT_cyl/dt in K/s for the state's T_cyl, T_w and mdot_w.
[[nodiscard]] double plant_derivative(const PlantState& state, double alpha_c_mean, double t_mod,
                                      const ThermalPlantParams& params);

/// Water reference temperature from the solid-to-water heat flow.
[[nodiscard]] double water_temperature(double q_dot, double mdot_w, const ThermalPlantParams& params);

/// Total solid-to-water heat flow, W.
[[nodiscard]] double water_heat_flow(double t_cyl, double t_w, double mdot_w,
                                     const ThermalPlantParams& params);

struct SteadyState {
    double t_cyl = 0.0;
    double t_w = 0.0;
    double q_dot = 0.0;
    int iterations = 0;
};

/// Self-consistent fixed point of the plant under constant inputs. T_w is
/// coupled to Q_dot, which in turn depends on T_cyl; solved by fixed-point
/// iteration to |dT| < 1e-9 K. Throws NumericalError after 1000 iterations.
[[nodiscard]] SteadyState steady_state(double alpha_c_mean, double t_mod, double mdot_w,
                                       const ThermalPlantParams& params);

[[nodiscard]] inline double steady_state_temperature(double alpha_c_mean, double t_mod, double mdot_w,
                                                     const ThermalPlantParams& params) {
    return steady_state(alpha_c_mean, t_mod, mdot_w, params).t_cyl;
}

/// Inputs held constant over one integration step.
struct StepInputs {
    double alpha_c_mean = 0.0;  ///< <alpha_c>, W/(m^2 K)
    double t_mod = 0.0;         ///< K
    double mdot_w = 0.0;        ///< kg/s
};

/// Advances the plant by dt with classical RK4. T_w is evaluated once from
/// the incoming state's q_dot (explicit coupling) and held over the step.
/// `net_flux_integral`, when non-null, receives the trapezoidal integral of
/// the net heat-flux density into the lump over the step, J/m^2.
[[nodiscard]] PlantState plant_step(const PlantState& state, const StepInputs& inputs, double dt,
                                    const ThermalPlantParams& params, double* net_flux_integral = nullptr);

}  // namespace thermoflow
