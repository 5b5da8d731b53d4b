#pragma once

// File formats: metrics JSON, time-series / range / sweep CSV, tuning JSON.
// Numbers are written in shortest round-trip form, so re-reading a file
// reproduces the values exactly. Non-finite values appear as null in JSON and
// as "nan" in CSV.

#include "thermoflow/montecarlo.hpp"
#include "thermoflow/tuning.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermoflow {

[[nodiscard]] std::string format_number(double v);

[[nodiscard]] nlohmann::json to_json(const LapMetrics& metrics);
/// Throws ConfigError when a field is missing or has the wrong type.
[[nodiscard]] LapMetrics metrics_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json to_json(const PidGains& gains);
/// Accepts {"k_p", "k_i", "k_d"} at the top level or under "gains", which
/// covers both tune output and hand-written files.
[[nodiscard]] PidGains gains_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json tuning_json(const OperatingPoint& op, const LinearPlant& plant,
                                         const KesslerTuning& tuning);

/// Header t,T_cyl,T_w,mdot_cmd,mdot_actual,Q_dot,P_hyd.
void write_time_series_csv(std::ostream& out, const std::vector<TimeSeriesRow>& rows);
[[nodiscard]] std::vector<TimeSeriesRow> parse_time_series_csv(std::istream& in);

void write_range_csv(std::ostream& out, const std::vector<RangePoint>& points);

/// One row per point: k_p, k_i, k_d, every metric field, stable.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
[[nodiscard]] nlohmann::json sweep_summary_json(const SweepSpec& spec, const SweepResult& result,
                                                const ObjectiveWeights& weights);

[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace thermoflow
