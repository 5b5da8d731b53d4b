#pragma once

// Coolant flow strategies: mechanical reference pump, feed-forward from the
// inverted steady-state plant, PID feedback, and feed-forward + PID.

#include "thermoflow/heat_input.hpp"
#include "thermoflow/plant.hpp"
#include "thermoflow/pump.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace thermoflow {

enum class Strategy { mechanical, feedforward, pid, combined };

[[nodiscard]] std::string_view to_string(Strategy strategy);
/// Throws ConfigError for unknown names.
[[nodiscard]] Strategy parse_strategy(std::string_view name);

/// Parallel-form gains of G_c = k_P + k_I/s + k_D s. Negative gains raise the
/// flow when the head runs hotter than the target.
struct PidGains {
    double k_p = -1.4;   ///< kg/(K s)
    double k_i = -0.05;  ///< kg/(K s^2)
    double k_d = -1.0;   ///< kg/K

    friend bool operator==(const PidGains&, const PidGains&) = default;
};

/// G_c = k_I (1 + T_R1 s)(1 + T_R2 s) / s.
struct SeriesPidForm {
    double k_i = 0.0;
    double t_r1 = 0.0;  ///< s
    double t_r2 = 0.0;  ///< s
};

/// Empty when k_I == 0 or the time constants are complex.
[[nodiscard]] std::optional<SeriesPidForm> to_series_form(const PidGains& gains);
[[nodiscard]] PidGains from_series_form(const SeriesPidForm& form);

/// Named gain sets. "reference" is the lap-study default; "integral_heavy"
/// drops the derivative part and doubles the integral part as a starting
/// point for sweeps. Throws ConfigError for unknown names.
[[nodiscard]] PidGains pid_preset(std::string_view name);

/// Target temperature per engine state. A coasting target above the fired
/// one gives the anticyclical schedule.
struct TargetSchedule {
    double fired = 407.0;     ///< K
    double coasting = 407.0;  ///< K

    [[nodiscard]] static TargetSchedule constant(double t) { return {t, t}; }
    [[nodiscard]] TargetSchedule shifted(double dt) const { return {fired + dt, coasting + dt}; }

    /// Both targets must lie in (T_w_in, 600 K].
    void validate(const ThermalPlantParams& plant) const;
};

[[nodiscard]] double target_for(const EngineSample& sample, const TargetSchedule& schedule);

struct ControllerState {
    double integral = 0.0;         ///< K s
    double previous_error = 0.0;   ///< K
    double derivative = 0.0;       ///< filtered de/dt, K/s
    bool primed = false;           ///< previous_error holds a real sample
};

/// Saturation context for conditional integration.
struct PidLimits {
    double base_flow = 0.0;               ///< flow the PID correction is added to, kg/s
    double flow_min = 0.0;                ///< kg/s
    double flow_max = 0.0;                ///< kg/s
    double derivative_filter_time = 0.02; ///< s
};

struct PidOutput {
    double delta = 0.0;  ///< kg/s added to base_flow
    ControllerState state;
};

/// One sample of the discrete PID. error = T_target - T_cyl.
///
/// The integrator is frozen while base_flow + correction sits outside
/// [flow_min, flow_max] and the error drives it further out, and |k_I * integral|
/// never exceeds flow_max - flow_min. The derivative acts on a first-order
/// filtered difference quotient; the first call only primes it.
[[nodiscard]] PidOutput pid_step(const ControllerState& state, double error, double dt, const PidGains& gains,
                                 const PidLimits& limits);

/// Nominal flow from the steady plant with T_w = T_w_in, clamped to the pump box.
/// Throws ConfigError when target <= T_w_in.
[[nodiscard]] double feed_forward_flow(const EngineSample& sample, double target, const HeatInputModel& heat,
                                       const ThermalPlantParams& plant, const PumpParams& pump);

/// Same inversion without the pump clamp; 0 when the heat input cannot reach the target.
[[nodiscard]] double feed_forward_flow_raw(const EngineSample& sample, double target, const HeatInputModel& heat,
                                           const ThermalPlantParams& plant);

/// Crank-driven pump: flow proportional to engine speed, clamped to the pump box.
[[nodiscard]] double mechanical_pump_flow(const EngineSample& sample, double ratio, const PumpParams& pump);

struct ControllerSpec {
    Strategy strategy = Strategy::pid;
    PidGains gains{};
    TargetSchedule schedule{};
    double mechanical_ratio = 1.674e-4;          ///< kg/s per rpm
    std::optional<double> base_flow;            ///< pure feedback base; default mid-box
    std::optional<double> derivative_filter_time; ///< default tau_p / 10

    void validate(const ThermalPlantParams& plant, const PumpParams& pump) const;
};

struct ModelSetup {
    ThermalPlantParams plant{};
    PumpParams pump{};
    HeatInputModel heat{};

    void validate() const {
        plant.validate();
        pump.validate();
        heat.validate();
    }
};

/// Per-run controller: owns the PID state and turns samples into flow commands.
class Controller {
public:
    Controller(ControllerSpec spec, const ModelSetup& setup);

    /// Flow command before any feedback acts; used to initialise the run.
    [[nodiscard]] double initial_command(const EngineSample& sample) const;

    /// Flow command for the current sample and measured T_cyl. Advances the PID state.
    [[nodiscard]] double command(const EngineSample& sample, double t_cyl, double dt);

    [[nodiscard]] const ControllerSpec& spec() const { return spec_; }
    [[nodiscard]] const ControllerState& state() const { return state_; }

private:
    [[nodiscard]] double nominal_flow(const EngineSample& sample) const;

    ControllerSpec spec_;
    ModelSetup setup_;
    ControllerState state_{};
    double base_flow_ = 0.0;
    double filter_time_ = 0.0;
};

}  // namespace thermoflow
