#include "thermoflow/config.hpp"

#include "thermoflow/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace thermoflow {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string where(const std::string& key) {
    return "config key '" + key + "'";
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
        throw ConfigError(where(key) + ": expected a finite number, got '" + v + "'");
    }
    return out;
}

template <class Int>
Int to_integer(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(where(key) + ": expected an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(where(key) + ": expected true or false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        const auto real = [&t](const std::string& key, auto ref) {
            t[key] = [key, ref](RunConfig& c, const std::string& v) { ref(c) = to_double(key, v); };
        };

        t["run.trace"] = [](RunConfig& c, const std::string& v) {
            if (v.empty()) {
                c.trace.reset();
            } else {
                c.trace = v;
            }
        };
        t["run.output_dir"] = [](RunConfig& c, const std::string& v) { c.output_dir = v; };
        real("run.dt", [](RunConfig& c) -> double& { return c.simulation.dt; });
        t["run.decimation"] = [](RunConfig& c, const std::string& v) {
            c.simulation.decimation = to_integer<std::size_t>("run.decimation", v);
        };
        t["run.warmup"] = [](RunConfig& c, const std::string& v) {
            if (v == "auto") {
                c.simulation.warmup.reset();
            } else {
                c.simulation.warmup = to_double("run.warmup", v);
            }
        };
        t["run.loop_until_periodic"] = [](RunConfig& c, const std::string& v) {
            c.simulation.loop_until_periodic = to_bool("run.loop_until_periodic", v);
        };
        t["run.min_laps"] = [](RunConfig& c, const std::string& v) {
            c.simulation.min_laps = to_integer<int>("run.min_laps", v);
        };
        t["run.max_laps"] = [](RunConfig& c, const std::string& v) {
            c.simulation.max_laps = to_integer<int>("run.max_laps", v);
        };
        real("run.periodic_tolerance", [](RunConfig& c) -> double& { return c.simulation.periodic_tolerance; });
        real("run.reynolds_flow_threshold",
             [](RunConfig& c) -> double& { return c.simulation.reynolds_flow_threshold; });
        t["run.seed"] = [](RunConfig& c, const std::string& v) {
            c.seed = to_integer<std::uint64_t>("run.seed", v);
            c.sweep.seed = c.seed;
        };
        t["run.jobs"] = [](RunConfig& c, const std::string& v) { c.jobs = to_integer<unsigned>("run.jobs", v); };

        real("plant.c_v", [](RunConfig& c) -> double& { return c.setup.plant.c_v; });
        real("plant.rho", [](RunConfig& c) -> double& { return c.setup.plant.rho; });
        real("plant.dx", [](RunConfig& c) -> double& { return c.setup.plant.dx; });
        real("plant.chi", [](RunConfig& c) -> double& { return c.setup.plant.chi; });
        real("plant.alpha_ref", [](RunConfig& c) -> double& { return c.setup.plant.alpha_ref; });
        real("plant.mdot_ref", [](RunConfig& c) -> double& { return c.setup.plant.mdot_ref; });
        real("plant.m_exp", [](RunConfig& c) -> double& { return c.setup.plant.m_exp; });
        real("plant.t_w_in", [](RunConfig& c) -> double& { return c.setup.plant.t_w_in; });
        real("plant.c_p_w", [](RunConfig& c) -> double& { return c.setup.plant.c_p_w; });
        real("plant.wetted_area", [](RunConfig& c) -> double& { return c.setup.plant.wetted_area; });

        real("pump.tau_p", [](RunConfig& c) -> double& { return c.setup.pump.tau_p; });
        real("pump.mdot_min", [](RunConfig& c) -> double& { return c.setup.pump.mdot_min; });
        real("pump.mdot_max", [](RunConfig& c) -> double& { return c.setup.pump.mdot_max; });
        real("pump.f_max", [](RunConfig& c) -> double& { return c.setup.pump.f_max; });
        real("pump.hydraulic_coeff", [](RunConfig& c) -> double& { return c.setup.pump.hydraulic_coeff; });

        real("heat.fired_alpha_coeff", [](RunConfig& c) -> double& { return c.setup.heat.fired_alpha.coeff; });
        real("heat.fired_alpha_exponent", [](RunConfig& c) -> double& { return c.setup.heat.fired_alpha.exponent; });
        real("heat.fired_alpha_cov", [](RunConfig& c) -> double& { return c.setup.heat.fired_alpha_cov; });
        real("heat.coasting_alpha_coeff", [](RunConfig& c) -> double& { return c.setup.heat.coasting_alpha.coeff; });
        real("heat.coasting_alpha_exponent",
             [](RunConfig& c) -> double& { return c.setup.heat.coasting_alpha.exponent; });
        real("heat.coasting_alpha_cov", [](RunConfig& c) -> double& { return c.setup.heat.coasting_alpha_cov; });
        real("heat.t_gas_fired", [](RunConfig& c) -> double& { return c.setup.heat.t_gas_fired; });
        real("heat.t_gas_fired_std", [](RunConfig& c) -> double& { return c.setup.heat.t_gas_fired_std; });
        real("heat.t_gas_coasting", [](RunConfig& c) -> double& { return c.setup.heat.t_gas_coasting; });
        real("heat.t_gas_coasting_std", [](RunConfig& c) -> double& { return c.setup.heat.t_gas_coasting_std; });
        real("heat.correlation_alpha_t", [](RunConfig& c) -> double& { return c.setup.heat.correlation_alpha_t; });
        real("heat.speed_min", [](RunConfig& c) -> double& { return c.setup.heat.speed_min; });
        real("heat.speed_max", [](RunConfig& c) -> double& { return c.setup.heat.speed_max; });

        t["controller.strategy"] = [](RunConfig& c, const std::string& v) {
            c.controller.strategy = parse_strategy(v);
        };
        t["controller.preset"] = [](RunConfig& c, const std::string& v) { c.controller.gains = pid_preset(v); };
        real("controller.k_p", [](RunConfig& c) -> double& { return c.controller.gains.k_p; });
        real("controller.k_i", [](RunConfig& c) -> double& { return c.controller.gains.k_i; });
        real("controller.k_d", [](RunConfig& c) -> double& { return c.controller.gains.k_d; });
        t["controller.target"] = [](RunConfig& c, const std::string& v) {
            c.controller.schedule = TargetSchedule::constant(to_double("controller.target", v));
        };
        real("controller.target_fired", [](RunConfig& c) -> double& { return c.controller.schedule.fired; });
        real("controller.target_coasting", [](RunConfig& c) -> double& { return c.controller.schedule.coasting; });
        real("controller.mechanical_ratio", [](RunConfig& c) -> double& { return c.controller.mechanical_ratio; });
        t["controller.base_flow"] = [](RunConfig& c, const std::string& v) {
            if (v == "auto") {
                c.controller.base_flow.reset();
            } else {
                c.controller.base_flow = to_double("controller.base_flow", v);
            }
        };
        t["controller.derivative_filter_time"] = [](RunConfig& c, const std::string& v) {
            if (v == "auto") {
                c.controller.derivative_filter_time.reset();
            } else {
                c.controller.derivative_filter_time = to_double("controller.derivative_filter_time", v);
            }
        };

        real("tuning.t_w0", [](RunConfig& c) -> double& { return c.tuning.operating_point.t_w0; });
        real("tuning.t_cyl0", [](RunConfig& c) -> double& { return c.tuning.operating_point.t_cyl0; });
        real("tuning.mdot_w0", [](RunConfig& c) -> double& { return c.tuning.operating_point.mdot_w0; });
        real("tuning.tau_c", [](RunConfig& c) -> double& { return c.tuning.tau_c; });

        t["sweep.mode"] = [](RunConfig& c, const std::string& v) { c.sweep.mode = parse_sweep_mode(v); };
        t["sweep.strategy"] = [](RunConfig& c, const std::string& v) { c.sweep.strategy = parse_strategy(v); };
        real("sweep.k_p_min", [](RunConfig& c) -> double& { return c.sweep.k_p.lo; });
        real("sweep.k_p_max", [](RunConfig& c) -> double& { return c.sweep.k_p.hi; });
        real("sweep.k_i_min", [](RunConfig& c) -> double& { return c.sweep.k_i.lo; });
        real("sweep.k_i_max", [](RunConfig& c) -> double& { return c.sweep.k_i.hi; });
        real("sweep.k_d_min", [](RunConfig& c) -> double& { return c.sweep.k_d.lo; });
        real("sweep.k_d_max", [](RunConfig& c) -> double& { return c.sweep.k_d.hi; });
        t["sweep.k_p_count"] = [](RunConfig& c, const std::string& v) {
            c.sweep.k_p.count = to_integer<std::size_t>("sweep.k_p_count", v);
        };
        t["sweep.k_i_count"] = [](RunConfig& c, const std::string& v) {
            c.sweep.k_i.count = to_integer<std::size_t>("sweep.k_i_count", v);
        };
        t["sweep.k_d_count"] = [](RunConfig& c, const std::string& v) {
            c.sweep.k_d.count = to_integer<std::size_t>("sweep.k_d_count", v);
        };
        t["sweep.samples"] = [](RunConfig& c, const std::string& v) {
            c.sweep.samples = to_integer<std::size_t>("sweep.samples", v);
        };
        t["sweep.target"] = [](RunConfig& c, const std::string& v) {
            c.sweep.target = TargetSchedule::constant(to_double("sweep.target", v));
        };
        real("sweep.std_weight", [](RunConfig& c) -> double& { return c.weights.std_weight; });
        real("sweep.power_weight", [](RunConfig& c) -> double& { return c.weights.power_weight; });

        real("range.target_min", [](RunConfig& c) -> double& { return c.range.target_min; });
        real("range.target_max", [](RunConfig& c) -> double& { return c.range.target_max; });
        real("range.target_step", [](RunConfig& c) -> double& { return c.range.target_step; });

        real("calibrate.target_max", [](RunConfig& c) -> double& { return c.calibrate.target_max; });
        t["calibrate.iterations"] = [](RunConfig& c, const std::string& v) {
            c.calibrate.iterations = to_integer<int>("calibrate.iterations", v);
        };
        return t;
    }();
    return table;
}

}  // namespace

std::vector<double> RangeSettings::targets() const {
    if (!(target_step > 0.0) || target_max < target_min) {
        throw ConfigError("range: require target_min <= target_max and target_step > 0");
    }
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((target_max - target_min) / target_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        out.push_back(target_min + static_cast<double>(i) * target_step);
    }
    return out;
}

void RunConfig::validate() const {
    setup.validate();
    simulation.validate(setup.pump);
    controller.validate(setup.plant, setup.pump);
    sweep.validate();
    sweep.target.validate(setup.plant);
    for (const double t : range.targets()) {
        TargetSchedule::constant(t).validate(setup.plant);
    }
    if (calibrate.iterations < 1) {
        throw ConfigError("calibrate: iterations must be positive");
    }
    if (!(tuning.tau_c > 0.0)) {
        throw ConfigError("tuning: tau_c must be positive");
    }
    if (!(weights.std_weight >= 0.0) || !(weights.power_weight >= 0.0) ||
        weights.std_weight + weights.power_weight <= 0.0) {
        throw ConfigError("sweep: weights must be non-negative and not both zero");
    }
}

void apply_setting(RunConfig& config, const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    const auto& table = setters();
    const auto it = table.find(full);
    if (it == table.end()) {
        throw ConfigError("unknown config key '" + full + "'");
    }
    it->second(config, value);
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    }
    apply_setting(config, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1),
                  assignment.substr(eq + 1));
}

RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError("config key '" + section + "' appears outside a section");
        }
        for (const auto& [key, value] : body) {
            apply_setting(config, section, key, value.data());
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return parse_config(in);
}

std::vector<std::string> known_keys() {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) {
        out.push_back(key);
    }
    return out;
}

}  // namespace thermoflow
