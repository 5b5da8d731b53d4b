#include "thermoflow/cli.hpp"

#include "thermoflow/config.hpp"
#include "thermoflow/errors.hpp"
#include "thermoflow/report.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace thermoflow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::string output_dir;
    std::string trace;
    std::string strategy;
    std::string gains_json;
    std::vector<std::string> overrides;
};

RunConfig resolve_config(const Flags& flags) {
    RunConfig config = flags.config.empty() ? RunConfig{} : load_config(flags.config);
    for (const auto& o : flags.overrides) {
        apply_override(config, o);
    }
    if (flags.seed) {
        config.seed = *flags.seed;
        config.sweep.seed = *flags.seed;
    }
    if (flags.jobs) {
        config.jobs = *flags.jobs;
    }
    if (!flags.output_dir.empty()) {
        config.output_dir = flags.output_dir;
    }
    if (!flags.trace.empty()) {
        config.trace = flags.trace;
    }
    if (!flags.strategy.empty()) {
        config.controller.strategy = parse_strategy(flags.strategy);
    }
    if (!flags.gains_json.empty()) {
        config.controller.gains = gains_from_json(read_json_file(flags.gains_json));
    }
    config.validate();
    return config;
}

LapTrace load_trace(const RunConfig& config) {
    if (!config.trace) {
        return synthetic_lap();
    }
    if (!fs::is_regular_file(*config.trace)) {
        throw ConfigError("trace file not found: " + config.trace->string());
    }
    return read_trace_csv(*config.trace);
}

fs::path prepare_output(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    return config.output_dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    const auto trace = load_trace(config);
    auto result = simulate_lap(trace, config.controller, config.setup, config.simulation);

    ControllerSpec reference = config.controller;
    reference.strategy = Strategy::mechanical;
    SimulationOptions quiet = config.simulation;
    quiet.decimation = std::numeric_limits<std::size_t>::max();
    const auto ref = simulate_lap(trace, reference, config.setup, quiet).metrics;
    result.metrics.heat_saving_vs_reference = heat_saving(result.metrics, ref);

    const auto dir = prepare_output(config);
    auto csv = open_output(dir / "timeseries.csv");
    write_time_series_csv(csv, result.series);
    write_json_file(dir / "metrics.json", to_json(result.metrics));

    const auto& m = result.metrics;
    out << "strategy " << to_string(config.controller.strategy) << ": mean " << format_number(m.mean_T_cyl)
        << " K, std " << format_number(m.std_T_cyl) << " K, max " << format_number(m.max_T_cyl)
        << " K, heat saving " << format_number(m.heat_saving_vs_reference) << " W\n";
    out << "wrote " << (dir / "metrics.json").string() << " and " << (dir / "timeseries.csv").string() << '\n';
    return exit_ok;
}

int cmd_tune(const RunConfig& config, std::ostream& out) {
    const auto& op = config.tuning.operating_point;
    const auto plant = linearize_plant(op, config.setup.plant, config.setup.pump);
    const auto tuning = kessler_tune(plant.tau_e, config.setup.pump.tau_p, plant.k_s_e, config.tuning.tau_c);
    const auto j = tuning_json(op, plant, tuning);
    const auto dir = prepare_output(config);
    write_json_file(dir / "tuning.json", j);
    out << j.dump(2) << '\n';
    return exit_ok;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    for (const auto& w : config.sweep.warnings()) {
        err << "warning: " << w << '\n';
    }
    const auto trace = load_trace(config);
    const auto result = run_sweep(config.sweep, trace, config.setup, config.simulation, config.jobs);
    const auto dir = prepare_output(config);
    auto csv = open_output(dir / "sweep.csv");
    write_sweep_csv(csv, result);
    const auto summary = sweep_summary_json(config.sweep, result, config.weights);
    write_json_file(dir / "sweep_summary.json", summary);

    out << result.points.size() << " points, " << summary["stable_points"].get<std::size_t>() << " stable, "
        << result.pareto.size() << " on the Pareto front\n";
    if (!summary["recommended"].is_null()) {
        out << "recommended gains: " << summary["recommended"]["gains"].dump() << '\n';
    } else {
        err << "warning: no stable point with nonzero k_I to recommend\n";
    }
    out << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep_summary.json").string() << '\n';
    return exit_ok;
}

int cmd_calibrate(const RunConfig& config, std::ostream& out) {
    const auto trace = load_trace(config);
    const auto cal = calibrate_mechanical_ratio(trace, config.setup, config.simulation, config.calibrate.target_max,
                                                config.calibrate.iterations);
    const auto dir = prepare_output(config);
    write_json_file(dir / "calibration.json",
                    json{{"target_max", config.calibrate.target_max},
                         {"mechanical_ratio", cal.ratio},
                         {"metrics", to_json(cal.metrics)}});
    out << "mechanical_ratio " << format_number(cal.ratio) << " kg/(s rpm), lap max "
        << format_number(cal.metrics.max_T_cyl) << " K\n";
    return exit_ok;
}

int cmd_range(const RunConfig& config, std::ostream& out) {
    const auto trace = load_trace(config);
    const auto points =
        feasible_range_sweep(config.range.targets(), config.controller, trace, config.setup, config.simulation,
                             config.jobs);
    const auto dir = prepare_output(config);
    auto csv = open_output(dir / "range.csv");
    write_range_csv(csv, points);
    double lo = points.front().metrics.mean_T_cyl;
    double hi = lo;
    for (const auto& p : points) {
        lo = std::min(lo, p.metrics.mean_T_cyl);
        hi = std::max(hi, p.metrics.mean_T_cyl);
    }
    out << "mean T_cyl from " << format_number(lo) << " K to " << format_number(hi) << " K (span "
        << format_number(hi - lo) << " K)\n";
    out << "wrote " << (dir / "range.csv").string() << '\n';
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coolant flow control studies on a lumped engine thermal model", "thermoflow"};
    app.fallthrough();
    app.require_subcommand(1, 1);

    Flags flags;
    app.add_option("--config", flags.config, "INI configuration file");
    app.add_option("--seed", flags.seed, "Random seed for sampled sweeps");
    app.add_option("--jobs", flags.jobs, "Worker threads (0 = all cores)");
    app.add_option("--output-dir", flags.output_dir, "Directory for output files");
    app.add_option("--trace", flags.trace, "Lap trace CSV (time_s,speed_rpm,fired)");
    app.add_option("--set", flags.overrides, "Override a config key, section.key=value")->take_all();

    auto* simulate = app.add_subcommand("simulate", "Simulate one strategy on the lap");
    simulate->add_option("--strategy", flags.strategy, "mechanical | feedforward | pid | combined");
    simulate->add_option("--gains-json", flags.gains_json, "JSON file with k_p, k_i, k_d");
    auto* tune = app.add_subcommand("tune", "Kessler first estimate of the PID gains");
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo / grid sweep over PID gains");
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate the mechanical pump ratio");
    auto* range = app.add_subcommand("range", "Feasible temperature range over PID targets");
    range->add_option("--strategy", flags.strategy, "pid | combined");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config_error;
    }

    try {
        const RunConfig config = resolve_config(flags);
        if (simulate->parsed()) {
            return cmd_simulate(config, out);
        }
        if (tune->parsed()) {
            return cmd_tune(config, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(config, out, err);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(config, out);
        }
        if (range->parsed()) {
            return cmd_range(config, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
    return exit_runtime_error;
}

}  // namespace thermoflow
