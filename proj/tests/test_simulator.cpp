#include "doctest.h"

#include "thermoflow/errors.hpp"
#include "thermoflow/simulator.hpp"
#include "thermoflow/tuning.hpp"

#include <cmath>
#include <sstream>

using namespace thermoflow;

namespace {

SimulationOptions single_pass() {
    SimulationOptions o;
    o.loop_until_periodic = false;
    return o;
}

ControllerSpec spec_for(Strategy s) {
    ControllerSpec spec;
    spec.strategy = s;
    return spec;
}

}  // namespace

TEST_CASE("constant operation settles") {
    const ModelSetup setup;
    const auto trace = constant_trace(6000.0, true, 120.0);

    SUBCASE("PID reaches the target") {
        const auto r = simulate_lap(trace, spec_for(Strategy::pid), setup, single_pass());
        CHECK(std::abs(r.metrics.final_T_cyl - 407.0) < 0.1);
    }

    SUBCASE("mechanical pump sits on the plant fixed point") {
        const auto spec = spec_for(Strategy::mechanical);
        const auto r = simulate_lap(trace, spec, setup, single_pass());
        const EngineSample s{0.0, 6000.0, true};
        const double flow = mechanical_pump_flow(s, spec.mechanical_ratio, setup.pump);
        const double t = steady_state_temperature(mean_alpha_c(s, setup.heat),
                                                  modified_gas_temperature(s, setup.heat), flow, setup.plant);
        CHECK(r.metrics.final_T_cyl == doctest::Approx(t).epsilon(1e-7));
        CHECK(r.metrics.std_T_cyl < 1e-6);
    }

    SUBCASE("step in speed settles within 0.1 K after ten time constants") {
        const LapTrace step({{0.0, 3000.0, true}, {1.0, 3000.0, true}, {1.001, 7000.0, true}, {60.0, 7000.0, true}});
        const auto spec = spec_for(Strategy::mechanical);
        const auto r = simulate_lap(step, spec, setup, single_pass());
        const EngineSample s{0.0, 7000.0, true};
        const double flow = mechanical_pump_flow(s, spec.mechanical_ratio, setup.pump);
        const double t = steady_state_temperature(mean_alpha_c(s, setup.heat),
                                                  modified_gas_temperature(s, setup.heat), flow, setup.plant);
        const double tau_e = setup.plant.areal_heat_capacity() / water_htc(flow, setup.plant);
        REQUIRE(59.0 > 10.0 * tau_e);
        CHECK(std::abs(r.metrics.final_T_cyl - t) < 0.1);
    }
}

TEST_CASE("lap runs") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();
    const SimulationOptions options;

    const auto mech = simulate_lap(lap, spec_for(Strategy::mechanical), setup, options);
    const auto pid = simulate_lap(lap, spec_for(Strategy::pid), setup, options);

    SUBCASE("deterministic") {
        const auto again = simulate_lap(lap, spec_for(Strategy::pid), setup, options);
        CHECK(again.metrics == pid.metrics);
        REQUIRE(again.series.size() == pid.series.size());
        CHECK(again.series.back().t_cyl == pid.series.back().t_cyl);
    }

    SUBCASE("feedback evens out the temperature") {
        CHECK(pid.metrics.std_T_cyl < mech.metrics.std_T_cyl);
    }

    SUBCASE("energy balance closes") {
        CHECK(mech.metrics.energy_balance_error < 1e-3);
        CHECK(pid.metrics.energy_balance_error < 1e-3);
    }

    SUBCASE("looping stops once laps repeat") {
        CHECK(pid.metrics.laps >= options.min_laps);
        CHECK(pid.metrics.laps <= options.max_laps);
    }

    SUBCASE("heat saving") {
        CHECK(heat_saving(mech.metrics, mech.metrics) == 0.0);
        CHECK(heat_saving(pid.metrics, mech.metrics) == mech.metrics.mean_Q_dot - pid.metrics.mean_Q_dot);
        ModelSetup other = setup;
        other.plant.dx = 0.02;
        const auto foreign = simulate_lap(lap, spec_for(Strategy::mechanical), other, options);
        CHECK_THROWS_AS((void)heat_saving(foreign.metrics, mech.metrics), ConfigError);
        const auto short_lap = constant_trace(5000.0, true, 30.0);
        const auto elsewhere = simulate_lap(short_lap, spec_for(Strategy::mechanical), setup, single_pass());
        CHECK_THROWS_AS((void)heat_saving(elsewhere.metrics, mech.metrics), ConfigError);
    }

    SUBCASE("time series") {
        CHECK(pid.series.front().t == 0.0);
        for (std::size_t i = 1; i < pid.series.size(); ++i) {
            CHECK(pid.series[i].t > pid.series[i - 1].t);
            CHECK(pid.series[i].mdot_actual >= setup.pump.mdot_min);
            CHECK(pid.series[i].mdot_actual <= setup.pump.mdot_max);
        }
    }
}

TEST_CASE("metrics do not depend on output decimation") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();
    SimulationOptions a;
    SimulationOptions b;
    a.decimation = 1;
    b.decimation = 997;
    const auto ra = simulate_lap(lap, spec_for(Strategy::combined), setup, a);
    const auto rb = simulate_lap(lap, spec_for(Strategy::combined), setup, b);
    CHECK(ra.metrics == rb.metrics);
    CHECK(ra.series.size() > rb.series.size());
}

TEST_CASE("halving the step changes little") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();
    SimulationOptions coarse;
    coarse.min_laps = coarse.max_laps = 3;
    SimulationOptions fine = coarse;
    fine.dt = 5e-4;
    for (auto s : {Strategy::mechanical, Strategy::pid}) {
        CAPTURE(to_string(s));
        const auto a = simulate_lap(lap, spec_for(s), setup, coarse).metrics;
        const auto b = simulate_lap(lap, spec_for(s), setup, fine).metrics;
        CHECK(std::abs(a.final_T_cyl - b.final_T_cyl) < 0.01);
    }
}

TEST_CASE("range sweep") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();
    const std::vector<double> targets{355.0, 400.0, 450.0, 515.0};
    const auto points = feasible_range_sweep(targets, spec_for(Strategy::pid), lap, setup, {}, 1);
    REQUIRE(points.size() == targets.size());
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].metrics.mean_T_cyl > points[i - 1].metrics.mean_T_cyl);
    }
    CHECK(points.front().saturation == Saturation::at_max_flow);
    CHECK(points.back().saturation == Saturation::at_min_flow);
    CHECK(points[1].saturation == Saturation::none);

    CHECK_THROWS_AS((void)feasible_range_sweep({400.0, 390.0}, spec_for(Strategy::pid), lap, setup, {}, 1),
                    ConfigError);
}

TEST_CASE("calibration") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();

    SUBCASE("mechanical ratio meets the lap maximum") {
        const auto cal = calibrate_mechanical_ratio(lap, setup, {}, 407.0, 20);
        CHECK(std::abs(cal.metrics.max_T_cyl - 407.0) < 0.1);
        CHECK(cal.ratio > 0.0);
        CHECK_THROWS_AS((void)calibrate_mechanical_ratio(lap, setup, {}, 2000.0, 20), NumericalError);
    }

    SUBCASE("target shift meets the lap maximum") {
        const auto cal = calibrate_target_for_max(lap, spec_for(Strategy::combined), setup, {}, 407.0, 30);
        CHECK(std::abs(cal.metrics.max_T_cyl - 407.0) < 0.1);
        CHECK(cal.schedule.fired < 407.0);
    }
}

TEST_CASE("invalid runs") {
    const ModelSetup setup;
    const auto lap = synthetic_lap();
    SimulationOptions o;
    o.dt = 0.05;
    CHECK_THROWS_AS((void)simulate_lap(lap, spec_for(Strategy::pid), setup, o), ConfigError);
    o = {};
    o.decimation = 0;
    CHECK_THROWS_AS((void)simulate_lap(lap, spec_for(Strategy::pid), setup, o), ConfigError);
    o = single_pass();
    o.warmup = 1000.0;
    CHECK_THROWS_AS((void)simulate_lap(lap, spec_for(Strategy::pid), setup, o), ConfigError);
    ModelSetup bad = setup;
    bad.plant.chi = 0.0;
    CHECK_THROWS_AS((void)simulate_lap(lap, spec_for(Strategy::pid), bad, {}), ConfigError);
}

TEST_CASE("lap trace") {
    const auto lap = synthetic_lap();
    CHECK(lap.has_both_states());
    CHECK(lap.duration() == doctest::Approx(83.375));

    SUBCASE("interpolation and hold") {
        const LapTrace t({{0.0, 1000.0, true}, {2.0, 3000.0, false}, {4.0, 3000.0, true}});
        CHECK(t.at(1.0).n == doctest::Approx(2000.0));
        CHECK(t.at(1.0).fired);
        CHECK_FALSE(t.at(2.5).fired);
        CHECK(t.at(-5.0).n == 1000.0);
        CHECK(t.at(99.0).n == 3000.0);
    }

    SUBCASE("csv round trip") {
        std::stringstream buf;
        write_trace_csv(lap, buf);
        const auto back = parse_trace_csv(buf);
        CHECK(back.fingerprint() == lap.fingerprint());
        CHECK(back.samples().size() == lap.samples().size());
    }

    SUBCASE("malformed csv") {
        const auto parse = [](const std::string& text) {
            std::istringstream in(text);
            return parse_trace_csv(in);
        };
        CHECK_THROWS_AS((void)parse("t,n,f\n0,1000,1\n1,1000,0\n"), ConfigError);
        CHECK_THROWS_AS((void)parse("time_s,speed_rpm,fired\n0,1000,1\n0,1000,0\n"), ConfigError);
        CHECK_THROWS_AS((void)parse("time_s,speed_rpm,fired\n0,1000,2\n1,1000,0\n"), ConfigError);
        CHECK_THROWS_AS((void)parse("time_s,speed_rpm,fired\n0,abc,1\n1,1000,0\n"), ConfigError);
        CHECK_THROWS_AS((void)parse("time_s,speed_rpm,fired\n0,1000,1\n1,1000,1\n"), ConfigError);
        CHECK_THROWS_AS((void)parse("time_s,speed_rpm,fired\n0,-5,1\n1,1000,0\n"), ConfigError);
        CHECK_NOTHROW((void)parse("time_s,speed_rpm,fired\n0,1000,1\n1,1000,0\n2,1000,1\n"));
    }

    SUBCASE("missing file") {
        CHECK_THROWS((void)read_trace_csv("/nonexistent/lap.csv"));
    }
}
