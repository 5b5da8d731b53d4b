#pragma once

// Run configuration: INI-style sections of `key = value` pairs in SI units.
//
//   [run]        trace, output_dir, dt, decimation, warmup, loop_until_periodic,
//                min_laps, max_laps, periodic_tolerance, reynolds_flow_threshold,
//                seed, jobs
//   [plant]      c_v, rho, dx, chi, alpha_ref, mdot_ref, m_exp, t_w_in, c_p_w, wetted_area
//   [pump]       tau_p, mdot_min, mdot_max, f_max, hydraulic_coeff
//   [heat]       fired_alpha_coeff, fired_alpha_exponent, fired_alpha_cov,
//                coasting_alpha_coeff, coasting_alpha_exponent, coasting_alpha_cov,
//                t_gas_fired, t_gas_fired_std, t_gas_coasting, t_gas_coasting_std,
//                correlation_alpha_t, speed_min, speed_max
//   [controller] strategy, preset, k_p, k_i, k_d, target, target_fired,
//                target_coasting, mechanical_ratio, base_flow, derivative_filter_time
//   [tuning]     t_w0, t_cyl0, mdot_w0, tau_c
//   [sweep]      mode, strategy, k_p_min, k_p_max, k_p_count, k_i_min, k_i_max,
//                k_i_count, k_d_min, k_d_max, k_d_count, samples, target,
//                std_weight, power_weight
//   [range]      target_min, target_max, target_step
//   [calibrate]  target_max, iterations
//
// Keys apply in file order, so `preset` followed by `k_d` overrides one gain.
// Command-line overrides apply after the file.

#include "thermoflow/montecarlo.hpp"
#include "thermoflow/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermoflow {

struct RangeSettings {
    double target_min = 355.0;  ///< K
    double target_max = 520.0;  ///< K
    double target_step = 10.0;  ///< K

    [[nodiscard]] std::vector<double> targets() const;
};

struct CalibrationSettings {
    double target_max = 407.0;  ///< K
    int iterations = 20;
};

struct TuningSettings {
    OperatingPoint operating_point{};
    double tau_c = 5.0;  ///< s
};

struct RunConfig {
    std::optional<std::filesystem::path> trace;  ///< empty: built-in synthetic lap
    std::filesystem::path output_dir = "thermoflow_out";
    std::uint64_t seed = 1;
    unsigned jobs = 0;  ///< 0: all hardware threads

    ModelSetup setup{};
    ControllerSpec controller{};
    SimulationOptions simulation{};
    TuningSettings tuning{};
    SweepSpec sweep{};
    ObjectiveWeights weights{};
    RangeSettings range{};
    CalibrationSettings calibrate{};

    /// Throws ConfigError if any section violates its invariants.
    void validate() const;
};

/// Throws ConfigError on unknown sections or keys, malformed values, or an
/// unreadable file.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
[[nodiscard]] RunConfig parse_config(std::istream& in);

/// Applies `section.key=value` on top of `config`.
void apply_override(RunConfig& config, const std::string& assignment);
void apply_setting(RunConfig& config, const std::string& section, const std::string& key, const std::string& value);

/// Every accepted `section.key`, for documentation and tests.
[[nodiscard]] std::vector<std::string> known_keys();

}  // namespace thermoflow
