#include "doctest.h"

#include "thermoflow/errors.hpp"
#include "thermoflow/pump.hpp"

#include <cmath>
#include <limits>

using namespace thermoflow;

TEST_CASE("pump lag") {
    PumpParams p;
    const double dt = 1e-3;

    SUBCASE("a settled pump stays put") {
        PumpState s{2.0};
        for (int i = 0; i < 1000; ++i) {
            s = pump_step(s, 2.0, dt, p);
        }
        CHECK(s.mdot_actual == doctest::Approx(2.0).epsilon(1e-15));
    }

    SUBCASE("step reaches 1 - 1/e after tau_p") {
        PumpState s{1.0};
        const int steps = static_cast<int>(std::lround(p.tau_p / dt));
        for (int i = 0; i < steps; ++i) {
            s = pump_step(s, 3.0, dt, p);
        }
        CHECK((s.mdot_actual - 1.0) / 2.0 == doctest::Approx(0.63212055882855768).epsilon(1e-12));
    }

    SUBCASE("decays onto the command") {
        PumpState s{4.5};
        for (int i = 0; i < 6000; ++i) {
            s = pump_step(s, 0.5, dt, p);
        }
        CHECK(std::abs(s.mdot_actual - 0.5) < 1e-9);
    }

    SUBCASE("commands are clamped") {
        PumpState s{1.0};
        for (int i = 0; i < 10000; ++i) {
            s = pump_step(s, 100.0, dt, p);
        }
        CHECK(s.mdot_actual == doctest::Approx(p.mdot_max));
        for (int i = 0; i < 10000; ++i) {
            s = pump_step(s, -5.0, dt, p);
        }
        CHECK(s.mdot_actual == doctest::Approx(p.mdot_min));
        s = pump_step(s, std::numeric_limits<double>::quiet_NaN(), dt, p);
        CHECK(std::isfinite(s.mdot_actual));
    }

    SUBCASE("step size limits") {
        CHECK_THROWS_AS((void)pump_step({1.0}, 1.0, 0.0, p), ConfigError);
        CHECK_THROWS_AS((void)pump_step({1.0}, 1.0, 0.05, p), ConfigError);
        CHECK_NOTHROW((void)pump_step({1.0}, 1.0, 0.02, p));
    }
}

TEST_CASE("clamp") {
    PumpParams p;
    CHECK(p.clamp(-1.0) == p.mdot_min);
    CHECK(p.clamp(1e9) == p.mdot_max);
    CHECK(p.clamp(2.0) == 2.0);
    CHECK(p.clamp(std::numeric_limits<double>::quiet_NaN()) == p.mdot_min);
    CHECK(p.mid_flow() == doctest::Approx(2.375));
}

TEST_CASE("hydraulic power") {
    PumpParams p;
    CHECK(hydraulic_power(0.0, p.hydraulic_coeff) == 0.0);
    CHECK(p.hydraulic_coeff == doctest::Approx(5.4869684499314129).epsilon(1e-14));
    CHECK(hydraulic_power(4.5, p.hydraulic_coeff) == doctest::Approx(500.0).epsilon(1e-13));
    CHECK(hydraulic_power(2.0, p.hydraulic_coeff) / hydraulic_power(1.0, p.hydraulic_coeff) ==
          doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("frequency response") {
    PumpParams p;
    CHECK(pump_gain(0.0, p) == 1.0);
    CHECK(pump_gain(5.0, p) == doctest::Approx(0.15717672547758984).epsilon(1e-12));
    CHECK(pump_gain(10.0, p) < pump_gain(5.0, p));
}

TEST_CASE("pump validation") {
    PumpParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.tau_p = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.mdot_max = 0.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.mdot_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
