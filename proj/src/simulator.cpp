#include "thermoflow/simulator.hpp"

#include "thermoflow/errors.hpp"
#include "thermoflow/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace thermoflow {

namespace {

/// Welford accumulator over the retained window.
class WindowStats {
public:
    void add(double t_cyl, double q_dot, double p_hyd, bool at_min, bool at_max, bool low_re, bool extrapolated) {
        ++count_;
        const double delta = t_cyl - mean_t_;
        mean_t_ += delta / static_cast<double>(count_);
        m2_t_ += delta * (t_cyl - mean_t_);
        max_t_ = std::max(max_t_, t_cyl);
        min_t_ = std::min(min_t_, t_cyl);
        sum_q_ += q_dot;
        sum_p_ += p_hyd;
        max_p_ = std::max(max_p_, p_hyd);
        at_min_ += at_min ? 1 : 0;
        at_max_ += at_max ? 1 : 0;
        low_re_ += low_re ? 1 : 0;
        extrapolated_ += extrapolated ? 1 : 0;
    }

    [[nodiscard]] std::size_t count() const { return count_; }

    [[nodiscard]] LapMetrics finish() const {
        const double n = static_cast<double>(count_);
        LapMetrics m;
        m.mean_T_cyl = mean_t_;
        m.std_T_cyl = std::sqrt(std::max(0.0, m2_t_ / n));
        m.max_T_cyl = max_t_;
        m.min_T_cyl = min_t_;
        m.mean_Q_dot = sum_q_ / n;
        m.mean_hydraulic_power = sum_p_ / n;
        m.max_hydraulic_power = max_p_;
        m.fraction_at_min_flow = static_cast<double>(at_min_) / n;
        m.fraction_at_max_flow = static_cast<double>(at_max_) / n;
        m.low_reynolds_fraction = static_cast<double>(low_re_) / n;
        m.extrapolated_fraction = static_cast<double>(extrapolated_) / n;
        return m;
    }

private:
    std::size_t count_ = 0;
    double mean_t_ = 0.0;
    double m2_t_ = 0.0;
    double max_t_ = -std::numeric_limits<double>::infinity();
    double min_t_ = std::numeric_limits<double>::infinity();
    double sum_q_ = 0.0;
    double sum_p_ = 0.0;
    double max_p_ = 0.0;
    std::size_t at_min_ = 0;
    std::size_t at_max_ = 0;
    std::size_t low_re_ = 0;
    std::size_t extrapolated_ = 0;
};

bool settled(const LapMetrics& prev, const LapMetrics& cur, double tolerance) {
    // Temperature metrics are judged against the lap's swing plus 1 K, not their absolute level.
    const double swing = std::max(prev.max_T_cyl - prev.min_T_cyl, 0.0) + 1.0;
    const std::array<std::pair<double, double>, 5> pairs{{
        {std::abs(cur.mean_T_cyl - prev.mean_T_cyl), swing},
        {std::abs(cur.max_T_cyl - prev.max_T_cyl), swing},
        {std::abs(cur.min_T_cyl - prev.min_T_cyl), swing},
        {std::abs(cur.std_T_cyl - prev.std_T_cyl), std::max(prev.std_T_cyl, 0.1)},
        {std::abs(cur.mean_Q_dot - prev.mean_Q_dot), std::abs(prev.mean_Q_dot) + 1.0},
    }};
    return std::all_of(pairs.begin(), pairs.end(), [&](const auto& p) { return p.first <= tolerance * p.second; });
}

std::uint64_t mix(std::uint64_t h, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double max_speed(const LapTrace& trace) {
    double n = 0.0;
    for (const auto& s : trace.samples()) {
        n = std::max(n, s.n);
    }
    return n;
}

double min_positive_speed(const LapTrace& trace) {
    double n = std::numeric_limits<double>::infinity();
    for (const auto& s : trace.samples()) {
        if (s.n > 0.0) {
            n = std::min(n, s.n);
        }
    }
    return n;
}

}  // namespace

void SimulationOptions::validate(const PumpParams& pump) const {
    if (!(dt > 0.0) || dt > pump.tau_p / 10.0) {
        throw ConfigError("simulation: dt must lie in (0, tau_p/10]");
    }
    if (decimation == 0) {
        throw ConfigError("simulation: decimation must be at least 1");
    }
    if (warmup && !(*warmup >= 0.0)) {
        throw ConfigError("simulation: warmup must be non-negative");
    }
    if (min_laps < 1 || max_laps < min_laps) {
        throw ConfigError("simulation: require 1 <= min_laps <= max_laps");
    }
    if (!(periodic_tolerance > 0.0)) {
        throw ConfigError("simulation: periodic_tolerance must be positive");
    }
}

std::uint64_t setup_fingerprint(const ModelSetup& setup) {
    const auto& p = setup.plant;
    const auto& h = setup.heat;
    std::uint64_t f = 0xcbf29ce484222325ULL;
    for (const double v : {p.c_v, p.rho, p.dx, p.chi, p.alpha_ref, p.mdot_ref, p.m_exp, p.t_w_in, p.c_p_w,
                           p.wetted_area, h.fired_alpha.coeff, h.fired_alpha.exponent, h.fired_alpha_cov,
                           h.coasting_alpha.coeff, h.coasting_alpha.exponent, h.coasting_alpha_cov, h.t_gas_fired,
                           h.t_gas_fired_std, h.t_gas_coasting, h.t_gas_coasting_std, h.correlation_alpha_t,
                           h.speed_min, h.speed_max}) {
        f = mix(f, v);
    }
    return f;
}

SimulationResult simulate_lap(const LapTrace& trace, const ControllerSpec& strategy, const ModelSetup& setup,
                              const SimulationOptions& options) {
    setup.validate();
    options.validate(setup.pump);
    if (trace.samples().size() < 2) {
        throw ConfigError("simulation: trace needs at least two samples");
    }

    const auto& plant = setup.plant;
    const auto& pump_params = setup.pump;
    const double dt = options.dt;
    const double t0 = trace.start_time();
    const auto steps_per_lap = static_cast<std::size_t>(std::llround(trace.duration() / dt));
    if (steps_per_lap == 0) {
        throw ConfigError("simulation: trace shorter than one step");
    }
    const double warmup = options.loop_until_periodic
                              ? 0.0
                              : options.warmup.value_or(5.0 * plant.areal_heat_capacity() / plant.alpha_ref);
    if (!options.loop_until_periodic && warmup >= trace.duration()) {
        throw ConfigError("simulation: warm-up window covers the whole trace");
    }

    Controller controller(strategy, setup);
    const EngineSample first = trace.at(t0);
    PumpState pump{controller.initial_command(first)};
    const SteadyState init =
        steady_state(mean_alpha_c(first, setup.heat), modified_gas_temperature(first, setup.heat), pump.mdot_actual, plant);
    PlantState state{0.0, init.t_cyl, init.t_w, pump.mdot_actual, init.q_dot};

    SimulationResult result;
    const int laps_cap = options.loop_until_periodic ? options.max_laps : 1;
    result.series.reserve(static_cast<std::size_t>(laps_cap) * steps_per_lap / options.decimation + 2);
    result.series.push_back({0.0, state.t_cyl, state.t_w, pump.mdot_actual, pump.mdot_actual, state.q_dot,
                             hydraulic_power(pump.mdot_actual, pump_params.hydraulic_coeff)});

    const double capacity = plant.areal_heat_capacity();
    const double t_cyl_start = state.t_cyl;
    double flux_integral = 0.0;
    double total_variation = 0.0;

    std::optional<LapMetrics> previous;
    LapMetrics current;
    std::size_t global_step = 0;
    int laps_run = 0;
    for (int lap = 0; lap < laps_cap; ++lap) {
        WindowStats window;
        for (std::size_t k = 0; k < static_cast<std::size_t>(steps_per_lap); ++k) {
            const double t_local = static_cast<double>(k) * dt;
            const EngineSample sample = trace.at(t0 + t_local);
            const double command = controller.command(sample, state.t_cyl, dt);

            const StepInputs inputs{mean_alpha_c(sample, setup.heat), modified_gas_temperature(sample, setup.heat),
                                    pump.mdot_actual};
            double step_flux = 0.0;
            PlantState next = plant_step(state, inputs, dt, plant, &step_flux);
            pump = pump_step(pump, command, dt, pump_params);
            ++global_step;
            next.t = static_cast<double>(global_step) * dt;
            next.mdot_w = pump.mdot_actual;

            if (!std::isfinite(next.t_cyl) || !std::isfinite(next.q_dot) || !std::isfinite(command)) {
                throw SimulationAborted("simulation: non-finite state", next.t);
            }

            flux_integral += step_flux;
            total_variation += std::abs(next.t_cyl - state.t_cyl);

            const double p_hyd = hydraulic_power(pump.mdot_actual, pump_params.hydraulic_coeff);
            if (t_local + dt > warmup + 0.5 * dt) {
                window.add(next.t_cyl, next.q_dot, p_hyd, command <= pump_params.mdot_min,
                           command >= pump_params.mdot_max, pump.mdot_actual < options.reynolds_flow_threshold,
                           !setup.heat.in_range(sample.n));
            }
            if (global_step % options.decimation == 0) {
                result.series.push_back(
                    {next.t, next.t_cyl, next.t_w, command, pump.mdot_actual, next.q_dot, p_hyd});
            }
            state = next;
        }
        laps_run = lap + 1;
        current = window.finish();
        if (previous && laps_run >= options.min_laps && settled(*previous, current, options.periodic_tolerance)) {
            break;
        }
        previous = current;
    }

    current.final_T_cyl = state.t_cyl;
    current.laps = laps_run;
    current.trace_fingerprint = trace.fingerprint();
    current.setup_fingerprint = setup_fingerprint(setup);
    const double stored = capacity * (state.t_cyl - t_cyl_start);
    const double scale = std::max(capacity * total_variation, std::numeric_limits<double>::min());
    current.energy_balance_error = std::abs(stored - flux_integral) / scale;
    result.metrics = current;
    return result;
}

double heat_saving(const LapMetrics& candidate, const LapMetrics& reference) {
    if (candidate.trace_fingerprint != reference.trace_fingerprint ||
        candidate.setup_fingerprint != reference.setup_fingerprint) {
        throw ConfigError("heat_saving: metrics come from different traces or plant models");
    }
    return reference.mean_Q_dot - candidate.mean_Q_dot;
}

MechanicalCalibration calibrate_mechanical_ratio(const LapTrace& trace, const ModelSetup& setup,
                                                 const SimulationOptions& options, double target_max,
                                                 int iterations) {
    ControllerSpec spec;
    spec.strategy = Strategy::mechanical;
    auto run = [&](double ratio) {
        spec.mechanical_ratio = ratio;
        return simulate_lap(trace, spec, setup, options).metrics;
    };

    // Below `lo` every speed maps to mdot_min, above `hi` every speed to mdot_max.
    double lo = 0.5 * setup.pump.mdot_min / max_speed(trace);
    double hi = 2.0 * setup.pump.mdot_max / min_positive_speed(trace);
    const LapMetrics hottest = run(lo);
    const LapMetrics coolest = run(hi);
    if (target_max > hottest.max_T_cyl || target_max < coolest.max_T_cyl) {
        throw NumericalError("calibrate_mechanical_ratio: target maximum outside the reachable range [" +
                             std::to_string(coolest.max_T_cyl) + ", " + std::to_string(hottest.max_T_cyl) + "] K");
    }
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (run(mid).max_T_cyl > target_max) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double ratio = 0.5 * (lo + hi);
    return {ratio, run(ratio)};
}

TargetCalibration calibrate_target_for_max(const LapTrace& trace, const ControllerSpec& strategy,
                                           const ModelSetup& setup, const SimulationOptions& options,
                                           double desired_max, int iterations) {
    ControllerSpec spec = strategy;
    const TargetSchedule base = strategy.schedule;
    auto run = [&](double shift) {
        spec.schedule = base.shifted(shift);
        return simulate_lap(trace, spec, setup, options).metrics;
    };

    const double low_target = std::min(base.fired, base.coasting);
    const double high_target = std::max(base.fired, base.coasting);
    double lo = setup.plant.t_w_in + 1.0 - low_target;
    double hi = 600.0 - high_target;
    if (run(lo).max_T_cyl > desired_max || run(hi).max_T_cyl < desired_max) {
        throw NumericalError("calibrate_target_for_max: desired maximum not reachable by shifting the target");
    }
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (run(mid).max_T_cyl > desired_max) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double shift = 0.5 * (lo + hi);
    return {base.shifted(shift), run(shift)};
}

std::vector<RangePoint> feasible_range_sweep(const std::vector<double>& targets, const ControllerSpec& strategy,
                                             const LapTrace& trace, const ModelSetup& setup,
                                             const SimulationOptions& options, unsigned jobs) {
    if (!std::is_sorted(targets.begin(), targets.end())) {
        throw ConfigError("feasible_range_sweep: targets must be sorted ascending");
    }
    std::vector<RangePoint> out(targets.size());
    parallel_for(targets.size(), jobs, [&](std::size_t i) {
        ControllerSpec spec = strategy;
        spec.schedule = TargetSchedule::constant(targets[i]);
        RangePoint point;
        point.target = targets[i];
        point.metrics = simulate_lap(trace, spec, setup, options).metrics;
        if (point.metrics.fraction_at_max_flow > 0.9) {
            point.saturation = Saturation::at_max_flow;
        } else if (point.metrics.fraction_at_min_flow > 0.9) {
            point.saturation = Saturation::at_min_flow;
        }
        out[i] = point;
    });
    return out;
}

}  // namespace thermoflow
