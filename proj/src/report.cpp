#include "thermoflow/report.hpp"

#include "thermoflow/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

namespace thermoflow {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<const char*, double LapMetrics::*>, 14> kMetricFields{{
    {"mean_T_cyl", &LapMetrics::mean_T_cyl},
    {"std_T_cyl", &LapMetrics::std_T_cyl},
    {"max_T_cyl", &LapMetrics::max_T_cyl},
    {"min_T_cyl", &LapMetrics::min_T_cyl},
    {"mean_Q_dot", &LapMetrics::mean_Q_dot},
    {"mean_hydraulic_power", &LapMetrics::mean_hydraulic_power},
    {"max_hydraulic_power", &LapMetrics::max_hydraulic_power},
    {"heat_saving_vs_reference", &LapMetrics::heat_saving_vs_reference},
    {"final_T_cyl", &LapMetrics::final_T_cyl},
    {"fraction_at_min_flow", &LapMetrics::fraction_at_min_flow},
    {"fraction_at_max_flow", &LapMetrics::fraction_at_max_flow},
    {"low_reynolds_fraction", &LapMetrics::low_reynolds_fraction},
    {"extrapolated_fraction", &LapMetrics::extrapolated_fraction},
    {"energy_balance_error", &LapMetrics::energy_balance_error},
}};

json number(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double read_number(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw ConfigError(std::string("json: missing field '") + key + "'");
    }
    const auto& v = j.at(key);
    if (v.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!v.is_number()) {
        throw ConfigError(std::string("json: field '") + key + "' is not a number");
    }
    return v.get<double>();
}

double parse_cell(const std::string& cell, std::size_t line) {
    if (cell == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + cell + "'");
    }
    return v;
}

void write_metric_header(std::ostream& out) {
    for (const auto& [name, member] : kMetricFields) {
        out << ',' << name;
    }
    out << ",laps";
}

void write_metric_cells(std::ostream& out, const LapMetrics& m) {
    for (const auto& [name, member] : kMetricFields) {
        out << ',' << format_number(m.*member);
    }
    out << ',' << m.laps;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), ptr};
}

json to_json(const LapMetrics& m) {
    json j = json::object();
    for (const auto& [name, member] : kMetricFields) {
        j[name] = number(m.*member);
    }
    j["laps"] = m.laps;
    j["trace_fingerprint"] = m.trace_fingerprint;
    j["setup_fingerprint"] = m.setup_fingerprint;
    return j;
}

LapMetrics metrics_from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("json: metrics must be an object");
    }
    LapMetrics m;
    for (const auto& [name, member] : kMetricFields) {
        m.*member = read_number(j, name);
    }
    try {
        m.laps = j.at("laps").get<int>();
        m.trace_fingerprint = j.at("trace_fingerprint").get<std::uint64_t>();
        m.setup_fingerprint = j.at("setup_fingerprint").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("json: ") + e.what());
    }
    return m;
}

json to_json(const PidGains& g) {
    return {{"k_p", g.k_p}, {"k_i", g.k_i}, {"k_d", g.k_d}};
}

PidGains gains_from_json(const json& j) {
    const json& src = j.contains("gains") ? j.at("gains") : j;
    PidGains g;
    g.k_p = read_number(src, "k_p");
    g.k_i = read_number(src, "k_i");
    g.k_d = read_number(src, "k_d");
    if (!std::isfinite(g.k_p) || !std::isfinite(g.k_i) || !std::isfinite(g.k_d)) {
        throw ConfigError("json: gains must be finite");
    }
    return g;
}

json tuning_json(const OperatingPoint& op, const LinearPlant& plant, const KesslerTuning& tuning) {
    return {
        {"operating_point", {{"t_w0", op.t_w0}, {"t_cyl0", op.t_cyl0}, {"mdot_w0", op.mdot_w0}}},
        {"tau_e", plant.tau_e},
        {"k_s_e", plant.k_s_e},
        {"t_r1", tuning.t_r1},
        {"t_r2", tuning.t_r2},
        {"tau_c", tuning.tau_c},
        {"gains", to_json(tuning.gains)},
    };
}

void write_time_series_csv(std::ostream& out, const std::vector<TimeSeriesRow>& rows) {
    out << "t,T_cyl,T_w,mdot_cmd,mdot_actual,Q_dot,P_hyd\n";
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << format_number(r.t_cyl) << ',' << format_number(r.t_w) << ','
            << format_number(r.mdot_cmd) << ',' << format_number(r.mdot_actual) << ',' << format_number(r.q_dot)
            << ',' << format_number(r.p_hyd) << '\n';
    }
}

std::vector<TimeSeriesRow> parse_time_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t,T_cyl,T_w,mdot_cmd,mdot_actual,Q_dot,P_hyd") {
        throw ConfigError("time series csv: unexpected header");
    }
    std::vector<TimeSeriesRow> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        std::array<double, 7> v{};
        std::istringstream cells(line);
        std::string cell;
        std::size_t k = 0;
        while (std::getline(cells, cell, ',')) {
            if (k >= v.size()) {
                throw ConfigError("csv line " + std::to_string(number) + ": too many columns");
            }
            v[k++] = parse_cell(cell, number);
        }
        if (k != v.size()) {
            throw ConfigError("csv line " + std::to_string(number) + ": expected 7 columns");
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    return rows;
}

void write_range_csv(std::ostream& out, const std::vector<RangePoint>& points) {
    out << "target";
    write_metric_header(out);
    out << ",saturation\n";
    for (const auto& p : points) {
        out << format_number(p.target);
        write_metric_cells(out, p.metrics);
        out << ',';
        switch (p.saturation) {
            case Saturation::none: out << "none"; break;
            case Saturation::at_max_flow: out << "max_flow"; break;
            case Saturation::at_min_flow: out << "min_flow"; break;
        }
        out << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "k_p,k_i,k_d";
    write_metric_header(out);
    out << ",stable\n";
    for (const auto& p : result.points) {
        out << format_number(p.gains.k_p) << ',' << format_number(p.gains.k_i) << ',' << format_number(p.gains.k_d);
        write_metric_cells(out, p.metrics);
        out << ',' << (p.stable ? 1 : 0) << '\n';
    }
}

json sweep_summary_json(const SweepSpec& spec, const SweepResult& result, const ObjectiveWeights& weights) {
    const auto interval = [](const Interval& iv) { return json{{"min", iv.lo}, {"max", iv.hi}, {"count", iv.count}}; };
    const auto point = [&](std::size_t i) {
        const auto& p = result.points[i];
        return json{{"index", i}, {"gains", to_json(p.gains)}, {"metrics", to_json(p.metrics)}};
    };
    std::size_t stable = 0;
    for (const auto& p : result.points) {
        stable += p.stable ? 1 : 0;
    }
    json j;
    j["spec"] = {{"mode", std::string(to_string(spec.mode))},
                 {"strategy", std::string(to_string(spec.strategy))},
                 {"k_p", interval(spec.k_p)},
                 {"k_i", interval(spec.k_i)},
                 {"k_d", interval(spec.k_d)},
                 {"samples", spec.samples},
                 {"seed", spec.seed},
                 {"target_fired", spec.target.fired},
                 {"target_coasting", spec.target.coasting}};
    j["points"] = result.points.size();
    j["stable_points"] = stable;
    j["best_by_std"] = result.best_by_std ? point(*result.best_by_std) : json(nullptr);
    j["best_by_power"] = result.best_by_power ? point(*result.best_by_power) : json(nullptr);
    json front = json::array();
    for (auto i : result.pareto) {
        front.push_back(point(i));
    }
    j["pareto"] = front;
    j["weights"] = {{"std_weight", weights.std_weight}, {"power_weight", weights.power_weight}};
    try {
        j["recommended"] = point(recommend_index(result, weights));
    } catch (const NumericalError&) {
        j["recommended"] = nullptr;
    }
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open json file " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace thermoflow
