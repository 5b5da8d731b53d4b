#include "doctest.h"

#include "thermoflow/cli.hpp"
#include "thermoflow/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace thermoflow;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "thermoflow");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("thermoflow_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("cli usage errors") {
    CHECK(cli({}).code == exit_config_error);
    CHECK(cli({"fly"}).code == exit_config_error);
    CHECK(cli({"--help"}).code == exit_ok);

    const auto dir = scratch("errors");
    auto r = cli({"--output-dir", dir.string(), "--trace", "/nonexistent/lap.csv", "simulate"});
    CHECK(r.code == exit_config_error);
    CHECK(r.err.find("/nonexistent/lap.csv") != std::string::npos);

    CHECK(cli({"--output-dir", dir.string(), "--set", "plant.nope=1", "tune"}).code == exit_config_error);
    CHECK(cli({"--output-dir", dir.string(), "--config", "/nonexistent.ini", "tune"}).code == exit_config_error);
    CHECK(cli({"--output-dir", dir.string(), "simulate", "--strategy", "warp"}).code == exit_config_error);
    CHECK(cli({"--output-dir", dir.string(), "simulate", "--gains-json", "/nonexistent.json"}).code ==
          exit_config_error);

    r = cli({"--output-dir", dir.string(), "--set", "calibrate.target_max=2000", "--set", "calibrate.iterations=1",
             "calibrate"});
    CHECK(r.code == exit_runtime_error);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("tune then simulate with the tuned gains") {
    const auto dir = scratch("tune");
    const auto r = cli({"--output-dir", dir.string(), "tune"});
    REQUIRE(r.code == exit_ok);
    const auto j = read_json_file(dir / "tuning.json");
    CHECK(j["k_s_e"].get<double>() == doctest::Approx(-16.1));
    CHECK(j["tau_e"].get<double>() == doctest::Approx(3.645));
    CHECK(nlohmann::json::parse(r.out) == j);

    const auto s = cli({"--output-dir", dir.string(), "simulate", "--gains-json", (dir / "tuning.json").string()});
    CHECK(s.code == exit_ok);
    CHECK(fs::exists(dir / "metrics.json"));
}

TEST_CASE("simulate writes what a direct run computes") {
    const auto dir = scratch("simulate");
    const auto r = cli({"--output-dir", dir.string(), "simulate", "--strategy", "combined"});
    REQUIRE(r.code == exit_ok);
    const auto m = metrics_from_json(read_json_file(dir / "metrics.json"));

    ControllerSpec spec;
    spec.strategy = Strategy::combined;
    const auto direct = simulate_lap(synthetic_lap(), spec, ModelSetup{}, SimulationOptions{});
    CHECK(m.mean_T_cyl == direct.metrics.mean_T_cyl);
    CHECK(m.std_T_cyl == direct.metrics.std_T_cyl);
    CHECK(m.laps == direct.metrics.laps);
    CHECK(m.heat_saving_vs_reference > 0.0);

    std::ifstream ts(dir / "timeseries.csv");
    const auto rows = parse_time_series_csv(ts);
    CHECK(rows.size() == direct.series.size());
}

TEST_CASE("flags override --set, which overrides the config file") {
    const auto dir = scratch("precedence");
    const auto ini = dir / "run.ini";
    std::ofstream(ini) << "[controller]\ntarget = 430\nstrategy = mechanical\n";
    const auto r = cli({"--config", ini.string(), "--set", "controller.target=420", "--output-dir", dir.string(),
                        "--set", "run.loop_until_periodic=false", "simulate", "--strategy", "pid"});
    REQUIRE(r.code == exit_ok);
    ControllerSpec spec;
    spec.schedule = TargetSchedule::constant(420.0);
    SimulationOptions o;
    o.loop_until_periodic = false;
    const auto direct = simulate_lap(synthetic_lap(), spec, ModelSetup{}, o);
    const auto m = metrics_from_json(read_json_file(dir / "metrics.json"));
    CHECK(m.mean_T_cyl == direct.metrics.mean_T_cyl);
}

TEST_CASE("single-point sweep agrees with simulate") {
    const auto dir = scratch("sweep");
    const auto r = cli({"--output-dir", dir.string(), "--set", "sweep.k_p_min=-1.4", "--set", "sweep.k_p_max=-1.4",
                        "--set", "sweep.k_p_count=1", "--set", "sweep.k_i_min=-0.05", "--set", "sweep.k_i_max=-0.05",
                        "--set", "sweep.k_i_count=1", "--set", "sweep.k_d_min=-1", "--set", "sweep.k_d_max=-1",
                        "--set", "sweep.k_d_count=1", "sweep"});
    REQUIRE(r.code == exit_ok);
    const auto summary = read_json_file(dir / "sweep_summary.json");
    CHECK(summary["points"] == 1);
    CHECK(line_count(dir / "sweep.csv") == 2u);

    const auto s = cli({"--output-dir", dir.string(), "simulate", "--gains-json", (dir / "sweep_summary.json").string()});
    // the summary has no top-level gains, only per-point ones
    CHECK(s.code == exit_config_error);

    std::ofstream(dir / "g.json") << summary["recommended"]["gains"].dump();
    REQUIRE(cli({"--output-dir", dir.string(), "simulate", "--gains-json", (dir / "g.json").string()}).code ==
            exit_ok);
    const auto m = metrics_from_json(read_json_file(dir / "metrics.json"));
    CHECK(m.std_T_cyl == summary["recommended"]["metrics"]["std_T_cyl"].get<double>());
}

TEST_CASE("sweep warns about positive gains") {
    const auto dir = scratch("sweep_warn");
    const auto r = cli({"--output-dir", dir.string(), "--set", "sweep.k_p_min=-1", "--set", "sweep.k_p_max=0.5",
                        "--set", "sweep.k_p_count=2", "--set", "sweep.k_i_count=1", "--set", "sweep.k_i_min=-0.05",
                        "--set", "sweep.k_i_max=-0.05", "--set", "sweep.k_d_count=1", "--set", "sweep.k_d_min=0",
                        "--set", "sweep.k_d_max=0", "sweep"});
    CHECK(r.code == exit_ok);
    CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("calibrate and range") {
    const auto dir = scratch("calibrate");
    auto r = cli({"--output-dir", dir.string(), "--set", "calibrate.iterations=6", "calibrate"});
    REQUIRE(r.code == exit_ok);
    const auto j = read_json_file(dir / "calibration.json");
    CHECK(j["mechanical_ratio"].get<double>() > 0.0);
    CHECK(j["metrics"]["max_T_cyl"].get<double>() == doctest::Approx(407.0).epsilon(0.01));

    r = cli({"--output-dir", dir.string(), "--set", "range.target_min=400", "--set", "range.target_max=420", "range"});
    REQUIRE(r.code == exit_ok);
    CHECK(line_count(dir / "range.csv") == 4u);
    CHECK(r.out.find("span") != std::string::npos);
}
