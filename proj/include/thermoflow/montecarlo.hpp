#pragma once

// PID gain sweeps over (k_P, k_I, k_D) scored by temperature regularity and
// hydraulic power.

#include "thermoflow/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thermoflow {

/// Closed interval sampled at `count` points. A single point needs lo == hi.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 21;

    [[nodiscard]] double at(std::size_t i) const;
};

enum class SweepMode { grid, random };

[[nodiscard]] std::string_view to_string(SweepMode mode);
[[nodiscard]] SweepMode parse_sweep_mode(std::string_view name);

struct SweepSpec {
    Interval k_p{-3.0, 0.0, 21};
    Interval k_i{-0.3, 0.0, 21};
    Interval k_d{-2.0, 0.0, 21};
    TargetSchedule target = TargetSchedule::constant(407.0);
    Strategy strategy = Strategy::pid;
    SweepMode mode = SweepMode::grid;
    std::size_t samples = 1000;  ///< random mode only
    std::uint64_t seed = 1;

    void validate() const;
    /// Human-readable notes about suspicious but legal settings, such as
    /// positive gains.
    [[nodiscard]] std::vector<std::string> warnings() const;
};

/// Gain sets to evaluate, in result order. Grid order is k_P outermost, k_D
/// innermost. Random mode draws a Latin hypercube from `seed`.
[[nodiscard]] std::vector<PidGains> sweep_points(const SweepSpec& spec);

struct SweepPoint {
    PidGains gains;
    LapMetrics metrics;  ///< NaN-filled for unstable runs
    bool stable = true;
    std::string failure;  ///< reason when not stable
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<std::size_t> best_by_std;
    std::optional<std::size_t> best_by_power;
    std::vector<std::size_t> pareto;  ///< ascending std_T_cyl
};

/// Runs one lap simulation per gain set. Runs that abort, produce non-finite
/// metrics or leave [300, 700] K are kept and marked unstable. Throws
/// NumericalError when no point is stable.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, const LapTrace& trace, const ModelSetup& setup,
                                    const SimulationOptions& options, unsigned jobs = 0);

/// Indices of the stable points not dominated on (std_T_cyl,
/// mean_hydraulic_power). When `exclude_zero_integral` is set, points with
/// k_I == 0 take no part.
[[nodiscard]] std::vector<std::size_t> pareto_front(const std::vector<SweepPoint>& points,
                                                    bool exclude_zero_integral = false);

struct ObjectiveWeights {
    double std_weight = 1.0;
    double power_weight = 0.0;
};

/// Pareto point (k_I != 0 only) with the smallest weighted sum of objectives,
/// each normalized to [0, 1] over the candidates. Ties go to the lower index.
[[nodiscard]] std::size_t recommend_index(const SweepResult& result, const ObjectiveWeights& weights);
[[nodiscard]] PidGains recommend_gains(const SweepResult& result, const ObjectiveWeights& weights);

}  // namespace thermoflow
