#pragma once

// Closed-loop lap simulation: trace -> heat input -> controller -> pump -> plant.

#include "thermoflow/control.hpp"
#include "thermoflow/lap_trace.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace thermoflow {

struct SimulationOptions {
    double dt = 1e-3;                        ///< s, fixed step
    std::size_t decimation = 100;            ///< emit every N-th step to the time series
    std::optional<double> warmup;            ///< s excluded from single-pass metrics; default 5 tau_e
    bool loop_until_periodic = true;         ///< repeat the lap until metrics settle
    int min_laps = 2;
    int max_laps = 10;
    double periodic_tolerance = 0.005;       ///< relative lap-to-lap metric change
    double reynolds_flow_threshold = 0.15;   ///< kg/s at which the jacket flow reaches Re = 2300

    void validate(const PumpParams& pump) const;
};

struct TimeSeriesRow {
    double t = 0.0;            ///< s
    double t_cyl = 0.0;        ///< K
    double t_w = 0.0;          ///< K
    double mdot_cmd = 0.0;     ///< controller output before the pump clamp, kg/s
    double mdot_actual = 0.0;  ///< kg/s
    double q_dot = 0.0;        ///< W
    double p_hyd = 0.0;        ///< W
};

/// Statistics over the retained window: the final lap when looping, otherwise
/// the single pass minus the warm-up window. Computed at full step resolution.
struct LapMetrics {
    double mean_T_cyl = 0.0;
    double std_T_cyl = 0.0;          ///< population standard deviation
    double max_T_cyl = 0.0;
    double min_T_cyl = 0.0;
    double mean_Q_dot = 0.0;
    double mean_hydraulic_power = 0.0;
    double max_hydraulic_power = 0.0;
    double heat_saving_vs_reference = 0.0;

    double final_T_cyl = 0.0;            ///< T_cyl at the end of the run
    double fraction_at_min_flow = 0.0;   ///< command at or below mdot_min
    double fraction_at_max_flow = 0.0;   ///< command at or above mdot_max
    double low_reynolds_fraction = 0.0;  ///< actual flow below the Re = 2300 threshold
    double extrapolated_fraction = 0.0;  ///< speed outside the heat model's range
    double energy_balance_error = 0.0;   ///< relative, whole run
    int laps = 1;
    std::uint64_t trace_fingerprint = 0;
    std::uint64_t setup_fingerprint = 0;

    friend bool operator==(const LapMetrics&, const LapMetrics&) = default;
};

struct SimulationResult {
    std::vector<TimeSeriesRow> series;
    LapMetrics metrics;
};

/// Throws ConfigError for invalid inputs and SimulationAborted on a non-finite state.
[[nodiscard]] SimulationResult simulate_lap(const LapTrace& trace, const ControllerSpec& strategy,
                                            const ModelSetup& setup, const SimulationOptions& options = {});

/// Hash of the physical model (plant and heat input) used to match metrics.
[[nodiscard]] std::uint64_t setup_fingerprint(const ModelSetup& setup);

/// reference.mean_Q_dot - candidate.mean_Q_dot. Throws ConfigError when the
/// two runs used different traces or plant models.
[[nodiscard]] double heat_saving(const LapMetrics& candidate, const LapMetrics& reference);

struct MechanicalCalibration {
    double ratio = 0.0;  ///< kg/s per rpm
    LapMetrics metrics;
};

/// Bisection (20 iterations) on the mechanical pump ratio until the lap maximum
/// of T_cyl equals `target_max`. Throws NumericalError when the target lies
/// outside what the pump box can reach.
[[nodiscard]] MechanicalCalibration calibrate_mechanical_ratio(const LapTrace& trace, const ModelSetup& setup,
                                                               const SimulationOptions& options,
                                                               double target_max = 407.0, int iterations = 20);

struct TargetCalibration {
    TargetSchedule schedule;
    LapMetrics metrics;
};

/// Shifts the strategy's target schedule by bisection until the lap maximum
/// of T_cyl equals `desired_max`, so strategies can be compared at equal peak.
[[nodiscard]] TargetCalibration calibrate_target_for_max(const LapTrace& trace, const ControllerSpec& strategy,
                                                         const ModelSetup& setup, const SimulationOptions& options,
                                                         double desired_max, int iterations = 30);

enum class Saturation { none, at_max_flow, at_min_flow };

struct RangePoint {
    double target = 0.0;
    LapMetrics metrics;
    Saturation saturation = Saturation::none;
};

/// One simulation per target (ascending) with a constant schedule. Targets with
/// the flow command pinned at a bound for more than 90 % of the retained lap
/// are flagged.
[[nodiscard]] std::vector<RangePoint> feasible_range_sweep(const std::vector<double>& targets,
                                                           const ControllerSpec& strategy, const LapTrace& trace,
                                                           const ModelSetup& setup,
                                                           const SimulationOptions& options, unsigned jobs = 0);

}  // namespace thermoflow
