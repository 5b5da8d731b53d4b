#include "doctest.h"

#include "thermoflow/errors.hpp"
#include "thermoflow/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace thermoflow;

namespace {

LapTrace short_lap() {
    return LapTrace({{0.0, 7000.0, true}, {8.0, 7400.0, true}, {8.001, 7400.0, false}, {10.0, 4000.0, false},
                     {10.001, 4000.0, true}, {20.0, 6800.0, true}});
}

SweepSpec tiny_spec() {
    SweepSpec s;
    s.k_p = {-2.0, -1.0, 2};
    s.k_i = {-0.1, -0.05, 2};
    s.k_d = {-1.0, -1.0, 1};
    return s;
}

bool dominated(const std::vector<SweepPoint>& pts, std::size_t i) {
    const auto& a = pts[i].metrics;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == i || !pts[j].stable) {
            continue;
        }
        const auto& b = pts[j].metrics;
        if (b.std_T_cyl <= a.std_T_cyl && b.mean_hydraulic_power <= a.mean_hydraulic_power &&
            (b.std_T_cyl < a.std_T_cyl || b.mean_hydraulic_power < a.mean_hydraulic_power)) {
            return true;
        }
    }
    return false;
}

SweepPoint fake(double std, double power, double k_i = -0.05) {
    SweepPoint p;
    p.gains = {-1.0, k_i, 0.0};
    p.metrics.std_T_cyl = std;
    p.metrics.mean_hydraulic_power = power;
    return p;
}

}  // namespace

TEST_CASE("intervals and grid order") {
    const Interval iv{-3.0, 0.0, 21};
    CHECK(iv.at(0) == -3.0);
    CHECK(iv.at(20) == 0.0);
    CHECK(iv.at(10) == doctest::Approx(-1.5));
    CHECK(Interval{2.0, 2.0, 1}.at(0) == 2.0);

    const auto pts = sweep_points(tiny_spec());
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == PidGains{-2.0, -0.1, -1.0});
    CHECK(pts[1] == PidGains{-2.0, -0.05, -1.0});
    CHECK(pts[2] == PidGains{-1.0, -0.1, -1.0});
    CHECK(pts[3] == PidGains{-1.0, -0.05, -1.0});
}

TEST_CASE("sweep spec validation") {
    auto s = tiny_spec();
    s.k_p = {-1.0, 0.0, 1};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = tiny_spec();
    s.k_i = {0.0, -1.0, 3};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = tiny_spec();
    s.strategy = Strategy::mechanical;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = tiny_spec();
    s.mode = SweepMode::random;
    s.samples = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK(tiny_spec().warnings().empty());
    s = tiny_spec();
    s.k_p = {-1.0, 1.0, 3};
    CHECK(s.warnings().size() == 1);
    CHECK(parse_sweep_mode(to_string(SweepMode::random)) == SweepMode::random);
    CHECK_THROWS_AS((void)parse_sweep_mode("sobol"), ConfigError);
}

TEST_CASE("latin hypercube") {
    SweepSpec s;
    s.mode = SweepMode::random;
    s.samples = 50;
    s.seed = 11;
    const auto a = sweep_points(s);
    const auto b = sweep_points(s);
    REQUIRE(a.size() == 50);
    CHECK(a == b);
    s.seed = 12;
    CHECK(sweep_points(s) != a);

    const auto strata = [&](double PidGains::*axis, const Interval& iv) {
        std::vector<long> cells;
        for (const auto& g : a) {
            cells.push_back(static_cast<long>(std::floor((g.*axis - iv.lo) / (iv.hi - iv.lo) * 50.0)));
        }
        std::sort(cells.begin(), cells.end());
        for (long i = 0; i < 50; ++i) {
            if (cells[static_cast<std::size_t>(i)] != i) {
                return false;
            }
        }
        return true;
    };
    CHECK(strata(&PidGains::k_p, s.k_p));
    CHECK(strata(&PidGains::k_i, s.k_i));
    CHECK(strata(&PidGains::k_d, s.k_d));
}

TEST_CASE("sweep runs") {
    const ModelSetup setup;
    const auto lap = short_lap();
    const SimulationOptions options;

    SUBCASE("a single point matches a direct run") {
        SweepSpec s;
        s.k_p = {-1.4, -1.4, 1};
        s.k_i = {-0.05, -0.05, 1};
        s.k_d = {-1.0, -1.0, 1};
        const auto r = run_sweep(s, lap, setup, options, 1);
        REQUIRE(r.points.size() == 1);
        ControllerSpec c;
        c.gains = {-1.4, -0.05, -1.0};
        CHECK(r.points[0].metrics == simulate_lap(lap, c, setup, options).metrics);
        CHECK(r.best_by_std == 0u);
        CHECK(r.pareto == std::vector<std::size_t>{0});
    }

    SUBCASE("thread count does not change results") {
        const auto a = run_sweep(tiny_spec(), lap, setup, options, 1);
        const auto b = run_sweep(tiny_spec(), lap, setup, options, 3);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].metrics == b.points[i].metrics);
        }
        CHECK(a.pareto == b.pareto);
    }

    SUBCASE("front matches brute force") {
        const auto r = run_sweep(tiny_spec(), lap, setup, options, 1);
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            const bool on_front = std::find(r.pareto.begin(), r.pareto.end(), i) != r.pareto.end();
            CHECK(on_front == !dominated(r.points, i));
        }
    }

    SUBCASE("a finer grid that contains the coarse one never does worse") {
        SweepSpec coarse;
        coarse.k_p = {-2.0, -0.5, 3};
        coarse.k_i = {-0.05, -0.05, 1};
        coarse.k_d = {-1.0, -1.0, 1};
        SweepSpec fine = coarse;
        fine.k_p.count = 5;
        const auto rc = run_sweep(coarse, lap, setup, options, 1);
        const auto rf = run_sweep(fine, lap, setup, options, 1);
        CHECK(rf.points[*rf.best_by_std].metrics.std_T_cyl <= rc.points[*rc.best_by_std].metrics.std_T_cyl);
    }

    SUBCASE("runaway gains are flagged") {
        ModelSetup hot = setup;
        hot.heat.fired_alpha.coeff *= 10.0;
        SweepSpec s;
        s.k_p = {-3.0, 3.0, 2};
        s.k_i = {0.0, 0.0, 1};
        s.k_d = {0.0, 0.0, 1};
        const auto r = run_sweep(s, lap, hot, options, 1);
        CHECK(r.points[0].stable);
        CHECK_FALSE(r.points[1].stable);
        CHECK(std::isnan(r.points[1].metrics.std_T_cyl));
        CHECK_FALSE(r.points[1].failure.empty());
        CHECK(r.pareto == std::vector<std::size_t>{0});

        s.k_p = {3.0, 3.0, 1};
        CHECK_THROWS_AS((void)run_sweep(s, lap, hot, options, 1), NumericalError);
    }
}

TEST_CASE("pareto front on random clouds") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coarse(0, 6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SweepPoint> pts;
        for (int i = 0; i < 40; ++i) {
            pts.push_back(fake(coarse(rng), coarse(rng)));
            pts.back().stable = coarse(rng) != 0;
        }
        const auto front = pareto_front(pts);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const bool expected = pts[i].stable && !dominated(pts, i);
            const bool got = std::find(front.begin(), front.end(), i) != front.end();
            CHECK(got == expected);
        }
        for (std::size_t k = 1; k < front.size(); ++k) {
            CHECK(pts[front[k - 1]].metrics.std_T_cyl <= pts[front[k]].metrics.std_T_cyl);
        }
    }
}

TEST_CASE("recommendation") {
    SweepResult r;
    r.points = {fake(1.0, 300.0, 0.0), fake(2.0, 100.0), fake(1.5, 200.0), fake(3.0, 400.0)};

    CHECK(recommend_index(r, {1.0, 0.0}) == 2);
    CHECK(recommend_index(r, {0.0, 1.0}) == 1);
    // equal scores: lower index wins
    CHECK(recommend_index(r, {1.0, 1.0}) == 1);
    CHECK(recommend_gains(r, {1.0, 0.0}) == r.points[2].gains);

    CHECK_THROWS_AS((void)recommend_index(r, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS((void)recommend_index(r, {-1.0, 1.0}), ConfigError);

    SweepResult none;
    none.points = {fake(1.0, 1.0, 0.0)};
    CHECK_THROWS_AS((void)recommend_index(none, {}), NumericalError);
}
