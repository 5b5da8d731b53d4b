#include "thermoflow/montecarlo.hpp"

#include "thermoflow/errors.hpp"
#include "thermoflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace thermoflow {

namespace {

constexpr double kStableMin = 300.0;
constexpr double kStableMax = 700.0;

void validate_interval(const Interval& iv, const char* name) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
        throw ConfigError(std::string("sweep: ") + name + " range must satisfy lo <= hi");
    }
    if (iv.count == 0) {
        throw ConfigError(std::string("sweep: ") + name + " count must be positive");
    }
    if (iv.count == 1 && iv.lo != iv.hi) {
        throw ConfigError(std::string("sweep: ") + name + " needs at least 2 points unless lo == hi");
    }
}

LapMetrics unstable_metrics() {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    LapMetrics m;
    m.mean_T_cyl = m.std_T_cyl = m.max_T_cyl = m.min_T_cyl = nan;
    m.mean_Q_dot = m.mean_hydraulic_power = m.max_hydraulic_power = nan;
    m.heat_saving_vs_reference = m.final_T_cyl = nan;
    m.energy_balance_error = nan;
    return m;
}

bool metrics_finite(const LapMetrics& m) {
    for (double v : {m.mean_T_cyl, m.std_T_cyl, m.max_T_cyl, m.min_T_cyl, m.mean_Q_dot, m.mean_hydraulic_power,
                     m.max_hydraulic_power}) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

/// Stratified draw on one axis: one sample per stratum, strata shuffled.
std::vector<double> latin_axis(const Interval& iv, std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> strata(n);
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(strata[i]) + unit(rng)) / static_cast<double>(n);
        out[i] = iv.lo + u * (iv.hi - iv.lo);
    }
    return out;
}

}  // namespace

double Interval::at(std::size_t i) const {
    if (count <= 1) {
        return lo;
    }
    if (i + 1 == count) {
        return hi;
    }
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::string_view to_string(SweepMode mode) {
    return mode == SweepMode::grid ? "grid" : "random";
}

SweepMode parse_sweep_mode(std::string_view name) {
    if (name == "grid") {
        return SweepMode::grid;
    }
    if (name == "random") {
        return SweepMode::random;
    }
    throw ConfigError("unknown sweep mode '" + std::string(name) + "' (expected grid or random)");
}

void SweepSpec::validate() const {
    validate_interval(k_p, "k_P");
    validate_interval(k_i, "k_I");
    validate_interval(k_d, "k_D");
    if (strategy != Strategy::pid && strategy != Strategy::combined) {
        throw ConfigError("sweep: strategy must be pid or combined");
    }
    if (mode == SweepMode::random && samples == 0) {
        throw ConfigError("sweep: random mode needs at least one sample");
    }
}

std::vector<std::string> SweepSpec::warnings() const {
    std::vector<std::string> out;
    const auto check = [&](const Interval& iv, const char* name) {
        if (iv.hi > 0.0) {
            out.push_back(std::string(name) +
                          " range includes positive values; the plant gain is negative so these gains destabilize");
        }
    };
    check(k_p, "k_P");
    check(k_i, "k_I");
    check(k_d, "k_D");
    return out;
}

std::vector<PidGains> sweep_points(const SweepSpec& spec) {
    spec.validate();
    std::vector<PidGains> out;
    if (spec.mode == SweepMode::grid) {
        out.reserve(spec.k_p.count * spec.k_i.count * spec.k_d.count);
        for (std::size_t a = 0; a < spec.k_p.count; ++a) {
            for (std::size_t b = 0; b < spec.k_i.count; ++b) {
                for (std::size_t c = 0; c < spec.k_d.count; ++c) {
                    out.push_back({spec.k_p.at(a), spec.k_i.at(b), spec.k_d.at(c)});
                }
            }
        }
        return out;
    }
    std::mt19937_64 rng(spec.seed);
    const auto kp = latin_axis(spec.k_p, spec.samples, rng);
    const auto ki = latin_axis(spec.k_i, spec.samples, rng);
    const auto kd = latin_axis(spec.k_d, spec.samples, rng);
    out.reserve(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        out.push_back({kp[i], ki[i], kd[i]});
    }
    return out;
}

SweepResult run_sweep(const SweepSpec& spec, const LapTrace& trace, const ModelSetup& setup,
                      const SimulationOptions& options, unsigned jobs) {
    const auto gains = sweep_points(spec);
    SimulationOptions run_options = options;
    run_options.decimation = std::numeric_limits<std::size_t>::max();

    SweepResult result;
    result.points.resize(gains.size());
    parallel_for(gains.size(), jobs, [&](std::size_t i) {
        ControllerSpec controller;
        controller.strategy = spec.strategy;
        controller.gains = gains[i];
        controller.schedule = spec.target;
        SweepPoint& point = result.points[i];
        point.gains = gains[i];
        try {
            point.metrics = simulate_lap(trace, controller, setup, run_options).metrics;
            if (!metrics_finite(point.metrics)) {
                point.stable = false;
                point.failure = "non-finite metrics";
            } else if (point.metrics.min_T_cyl < kStableMin || point.metrics.max_T_cyl > kStableMax) {
                point.stable = false;
                point.failure = "T_cyl left [300, 700] K";
            }
        } catch (const SimulationAborted& e) {
            point.stable = false;
            point.failure = e.what();
        }
        if (!point.stable) {
            point.metrics = unstable_metrics();
        }
    });

    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& p = result.points[i];
        if (!p.stable) {
            continue;
        }
        if (!result.best_by_std || p.metrics.std_T_cyl < result.points[*result.best_by_std].metrics.std_T_cyl) {
            result.best_by_std = i;
        }
        if (!result.best_by_power ||
            p.metrics.mean_hydraulic_power < result.points[*result.best_by_power].metrics.mean_hydraulic_power) {
            result.best_by_power = i;
        }
    }
    if (!result.best_by_std) {
        throw NumericalError("sweep: no stable point among " + std::to_string(result.points.size()));
    }
    result.pareto = pareto_front(result.points);
    return result;
}

std::vector<std::size_t> pareto_front(const std::vector<SweepPoint>& points, bool exclude_zero_integral) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].stable && !(exclude_zero_integral && points[i].gains.k_i == 0.0)) {
            idx.push_back(i);
        }
    }
    const auto key = [&](std::size_t i) {
        return std::pair{points[i].metrics.std_T_cyl, points[i].metrics.mean_hydraulic_power};
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    // Walk groups of equal std: a point survives when its power is the group
    // minimum and strictly below every power seen at smaller std.
    std::vector<std::size_t> front;
    double best_power = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t end = g;
        while (end < idx.size() && key(idx[end]).first == key(idx[g]).first) {
            ++end;
        }
        const double group_min = key(idx[g]).second;
        if (group_min < best_power) {
            for (std::size_t k = g; k < end && key(idx[k]).second == group_min; ++k) {
                front.push_back(idx[k]);
            }
            best_power = group_min;
        }
        g = end;
    }
    return front;
}

std::size_t recommend_index(const SweepResult& result, const ObjectiveWeights& weights) {
    if (!(weights.std_weight >= 0.0) || !(weights.power_weight >= 0.0) ||
        weights.std_weight + weights.power_weight <= 0.0) {
        throw ConfigError("recommend: weights must be non-negative and not both zero");
    }
    const auto front = pareto_front(result.points, true);
    if (front.empty()) {
        throw NumericalError("recommend: no stable point with nonzero k_I");
    }
    double s_lo = std::numeric_limits<double>::infinity();
    double s_hi = -s_lo;
    double p_lo = s_lo;
    double p_hi = -s_lo;
    for (auto i : front) {
        const auto& m = result.points[i].metrics;
        s_lo = std::min(s_lo, m.std_T_cyl);
        s_hi = std::max(s_hi, m.std_T_cyl);
        p_lo = std::min(p_lo, m.mean_hydraulic_power);
        p_hi = std::max(p_hi, m.mean_hydraulic_power);
    }
    const auto normalize = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
    std::size_t best = front.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (auto i : front) {
        const auto& m = result.points[i].metrics;
        const double score = weights.std_weight * normalize(m.std_T_cyl, s_lo, s_hi) +
                             weights.power_weight * normalize(m.mean_hydraulic_power, p_lo, p_hi);
        if (score < best_score || (score == best_score && i < best)) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

PidGains recommend_gains(const SweepResult& result, const ObjectiveWeights& weights) {
    return result.points[recommend_index(result, weights)].gains;
}

}  // namespace thermoflow
