#include "cliffpoint/analysis.hpp"
#include "cliffpoint/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cliffpoint;
using test_util::step_series;

TEST_CASE("degradation_rate") {
    CHECK(degradation_rate(0.556, 0.302) == doctest::Approx(0.254 / 0.556).epsilon(1e-14));
    CHECK(degradation_rate(0.556, 0.302) == doctest::Approx(0.4568).epsilon(0.0001 / 0.4568));
    CHECK(degradation_rate(0.5, 0.5) == 0.0);
    CHECK(degradation_rate(0.4, 0.5) < 0.0);
    CHECK_THROWS_AS(degradation_rate(0.0, 0.1), Error);
}

TEST_CASE("classify_cliff") {
    DegradationConfig cfg;
    SUBCASE("step 0.565 to 0.278") {
        const auto s = step_series(1000, 0.45, 0.565, 0.278);
        const auto ev = classify_cliff(s, 0.449, cfg);
        CHECK(ev.cliff);
        CHECK(ev.abrupt);
        CHECK(ev.persistent);
        CHECK(ev.degradation == doctest::Approx((0.565 - 0.278) / 0.565));
        CHECK(ev.degradation == doctest::Approx(0.508).epsilon(0.005 / 0.508));
        CHECK(ev.near_points == 30);
    }
    SUBCASE("mild step is not a cliff") {
        const auto ev = classify_cliff(step_series(1000, 0.45, 0.55, 0.45), 0.449, cfg);
        CHECK_FALSE(ev.abrupt);
        CHECK_FALSE(ev.cliff);
    }
    SUBCASE("abrupt but not persistent") {
        // far side recovers to 0.55 after a short dip
        PerformanceSeries s;
        for (int i = 0; i < 1000; ++i) {
            const double r = i / 1000.0;
            s.points.push_back({r, r < 0.45 ? 0.55 : r < 0.50 ? 0.30 : 0.55});
        }
        const auto ev = classify_cliff(s, 0.449, cfg);
        CHECK(ev.abrupt);
        CHECK_FALSE(ev.persistent);
        CHECK_FALSE(ev.cliff);
    }
    SUBCASE("one-sided input") {
        CHECK_THROWS_AS(classify_cliff(step_series(100, 0.45, 0.5, 0.3), 1.5, cfg), Error);
    }
}

TEST_CASE("region_stats") {
    const auto s = step_series(1000, 0.45, 0.55, 0.30);
    const std::vector<double> b{0.40, 0.50, 0.95};
    const auto regions = region_stats(s, b);
    REQUIRE(regions.size() == 3);
    CHECK(regions[0].name == "stable");
    CHECK(regions[1].name == "transition");
    CHECK(regions[2].name == "degraded");
    CHECK(regions[0].n == 400);
    CHECK(*regions[0].mean == doctest::Approx(0.55));
    CHECK(*regions[0].std == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(regions[1].n == 100);
    CHECK(*regions[1].mean == doctest::Approx((50 * 0.55 + 50 * 0.30) / 100));
    CHECK(regions[2].closed);
    CHECK(regions[2].n == 451);  // 0.500 .. 0.950 inclusive
    CHECK(*regions[2].min == 0.30);

    SUBCASE("empty region has absent statistics") {
        const auto r = region_stats(step_series(10, 0.5, 0.5, 0.3), std::vector<double>{0.01, 0.95, 1.0});
        CHECK(r[0].n == 1);
        CHECK_FALSE(r[0].std);
    }
    SUBCASE("other boundary counts use generic names") {
        const auto r = region_stats(s, std::vector<double>{0.5, 1.0});
        CHECK(r[0].name == "region_0");
    }
    CHECK_THROWS_AS(region_stats(s, std::vector<double>{0.5, 0.4}), Error);
}

TEST_CASE("two_sample_test") {
    const std::vector<double> a{0.9, 1.0, 1.1};
    const std::vector<double> b{0.1, 0.2, 0.3};

    SUBCASE("identical samples") {
        const auto r = two_sample_test(a, a, 1000);
        CHECK(r.t == 0.0);
        CHECK(r.d == 0.0);
    }
    SUBCASE("separated samples") {
        const auto r = two_sample_test(a, b);
        // pooled sd 0.1, mean gap 0.8
        CHECK(r.d == doctest::Approx(8.0).epsilon(0.01 / 8.0));
        CHECK(r.t == doctest::Approx(0.8 / std::sqrt(2 * 0.01 / 3)));
        CHECK(r.permutations == 10000);
        CHECK(r.p_floor == doctest::Approx(1.0 / 10001));
        // 2 of the 20 equally likely splits are as extreme as the observed one
        CHECK(r.p == doctest::Approx(0.1).epsilon(0.2));
    }
    SUBCASE("reproducible under a fixed seed") {
        const std::vector<double> x{0.5, 0.52, 0.47, 0.55, 0.49, 0.51};
        const std::vector<double> y{0.44, 0.5, 0.46, 0.48, 0.43};
        const auto r1 = two_sample_test(x, y, 2000, 7);
        const auto r2 = two_sample_test(x, y, 2000, 7);
        CHECK(r1.p == r2.p);
        CHECK(r1.t == r2.t);
        const auto r3 = two_sample_test(x, y, 2000, 8);
        CHECK(r3.t == r1.t);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(two_sample_test(std::vector<double>{1.0}, b), Error);
        CHECK_THROWS_AS(two_sample_test(std::vector<double>{1, 1}, std::vector<double>{2, 2}), Error);
    }
}

TEST_CASE("pearson_r") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(0.3 + 0.01 * i);
        y.push_back(0.9 - 0.7 * x.back());
    }
    CHECK(std::abs(pearson_r(x, y) + 1.0) <= 1e-9);
    CHECK(pearson_r(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pearson_r(x, std::vector<double>(50, 0.5)), Error);
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST_CASE("region_correlation and report") {
    PerformanceSeries s;
    for (int i = 0; i < 100; ++i) s.points.push_back({i / 100.0, 0.9 - 0.5 * i / 100.0});
    const auto c = region_correlation(s, 0.0, 0.5, false, 500, 1);
    CHECK(c.n == 50);
    CHECK(c.r == doctest::Approx(-1.0));
    CHECK(c.p == doctest::Approx(1.0 / 501));

    DegradationConfig cfg;
    const auto report = build_region_report(step_series(200, 0.45, 0.55, 0.30), cfg, 200, 42);
    CHECK(report.regions.size() == 3);
    CHECK(report.correlations.size() == 3);
    // stable and degraded regions are constant, so the test is degenerate and absent
    CHECK_FALSE(report.stable_vs_degraded);
    CHECK_FALSE(report.correlations[0]);
}

TEST_CASE("sensitivity") {
    CHECK(parse_sweep_parameter("w") == SweepParameter::peak_window);
    CHECK(parse_sweep_parameter("peak_window") == SweepParameter::peak_window);
    CHECK(parse_sweep_parameter("rise_range") == SweepParameter::rise_range_width);
    CHECK(parse_sweep_parameter("rebound") == SweepParameter::rebound_threshold);
    CHECK_THROWS_AS(parse_sweep_parameter("nope"), Error);

    DegradationConfig cfg;
    CHECK(with_parameter(cfg, SweepParameter::peak_window, 7).peak_window == 7);
    CHECK(with_parameter(cfg, SweepParameter::rebound_threshold, 0.8).rebound_threshold == 0.8);
    CHECK_THROWS_AS(with_parameter(cfg, SweepParameter::peak_window, 2.5), Error);

    const auto s = step_series(1000, 0.45, 0.55, 0.30);
    const std::vector<double> grid{3, 4, 5, 6, 7};
    const auto rep = sensitivity_sweep(s, cfg, SweepParameter::peak_window, grid);
    CHECK(rep.all_detected);
    REQUIRE(rep.thresholds.size() == 5);
    REQUIRE(rep.max_abs_deviation);
    CHECK(*rep.max_abs_deviation == doctest::Approx(0.0));
    CHECK_THROWS_AS(sensitivity_sweep(s, cfg, SweepParameter::peak_window, std::vector<double>{}), Error);
}
