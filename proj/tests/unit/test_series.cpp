#include "cliffpoint/error.hpp"
#include "cliffpoint/series.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cliffpoint;
using test_util::series_of;

TEST_CASE("compute_ratio") {
    CHECK(compute_ratio(131072, 131072) == 1.0);
    CHECK(compute_ratio(55296, 131072) == 0.421875);
    CHECK(compute_ratio(0, 131072) == 0.0);
    CHECK(compute_ratio(262144, 131072) == 2.0);  // > 1 passes through, flagged later

    SUBCASE("threshold token count is computed exactly") {
        // 0.432 of 131072 is 56623 tokens, not the rounded 55,296
        CHECK(std::lround(0.432 * 131072) == 56623);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(compute_ratio(10, 0), Error);
        try {
            compute_ratio(10, 0);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_config);
        }
        CHECK_THROWS_AS(compute_ratio(-1, 10), Error);
    }
}

TEST_CASE("preprocess") {
    SUBCASE("drops exact 0 and 1") {
        const auto out = preprocess(series_of({{0.1, 0.0}, {0.2, 0.5}, {0.3, 1.0}}));
        REQUIRE(out.size() == 1);
        CHECK(out.points[0] == SeriesPoint{0.2, 0.5});
        CHECK(out.summary.removed_extreme == 2);
    }
    SUBCASE("merges duplicates then sorts") {
        const auto out = preprocess(series_of({{0.2, 0.4}, {0.2, 0.6}, {0.1, 0.5}}));
        REQUIRE(out.size() == 2);
        CHECK(out.points[0] == SeriesPoint{0.1, 0.5});
        CHECK(out.points[1].ratio == 0.2);
        CHECK(out.points[1].performance == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(out.summary.merged_duplicates == 1);
    }
    SUBCASE("empty input yields an empty series that detectors reject") {
        const auto out = preprocess(PerformanceSeries{});
        CHECK(out.empty());
        CHECK_THROWS_AS(require_nonempty(out), Error);
    }
    SUBCASE("ratios above one are kept and counted") {
        const auto out = preprocess(series_of({{1.2, 0.4}, {0.5, 0.5}}));
        CHECK(out.size() == 2);
        CHECK(out.summary.ratio_above_one == 1);
    }
    SUBCASE("provenance records counts") {
        const auto out = preprocess(series_of({{0.1, 0.0}, {0.2, 0.5}}));
        CHECK(out.provenance.find("removed=1") != std::string::npos);
    }
}

TEST_CASE("preprocess properties on random series") {
    std::mt19937_64 g(1234);
    std::uniform_int_distribution<int> grid(0, 40);
    std::uniform_int_distribution<int> kind(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        PerformanceSeries s;
        const int n = 1 + static_cast<int>(g() % 60);
        for (int i = 0; i < n; ++i) {
            const int k = kind(g);
            const double p = k == 0 ? 0.0 : k == 1 ? 1.0 : std::uniform_real_distribution<double>(0.01, 0.99)(g);
            s.points.push_back({grid(g) / 40.0, p});
        }
        const auto once = preprocess(s);
        const auto twice = preprocess(once);
        CHECK(once.points == twice.points);
        for (std::size_t i = 1; i < once.size(); ++i) CHECK(once.points[i - 1].ratio < once.points[i].ratio);
        for (const auto& p : once.points) CHECK((p.performance != 0.0 && p.performance != 1.0));
        CHECK(once.summary.removed_extreme + once.summary.merged_duplicates + once.size() == s.size());
    }
}

TEST_CASE("moving_average") {
    const std::vector<double> a{1, 2, 3, 4};
    CHECK(moving_average(a, 2) == std::vector<double>{1, 1.5, 2.5, 3.5});
    const std::vector<double> b{5, 5, 5};
    CHECK(moving_average(b, 3) == b);
    const std::vector<double> c{1, 2, 3};
    CHECK(moving_average(c, 1) == c);
    CHECK_THROWS_AS(moving_average(c, 0), Error);
    CHECK(moving_average(std::vector<double>{}, 3).empty());

    SUBCASE("matches a naive trailing window on random data") {
        std::mt19937_64 g(7);
        for (int w = 1; w <= 9; ++w) {
            const auto v = test_util::random_values(g, 40, 0.0, 1.0);
            const auto ma = moving_average(v, w);
            REQUIRE(ma.size() == v.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                double sum = 0;
                int count = 0;
                for (int k = static_cast<int>(i); k >= 0 && count < w; --k, ++count) sum += v[static_cast<std::size_t>(k)];
                CHECK(ma[i] == doctest::Approx(sum / count).epsilon(1e-12));
            }
        }
    }
    SUBCASE("constant input is a fixed point for any window") {
        const std::vector<double> k(17, 0.37);
        for (int w = 1; w < 20; ++w) {
            for (double x : moving_average(k, w)) CHECK(x == doctest::Approx(0.37).epsilon(1e-15));
        }
    }
}

TEST_CASE("linear_slope") {
    CHECK(linear_slope(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 2}) == doctest::Approx(1.0));
    CHECK(linear_slope(std::vector<double>{0, 1}, std::vector<double>{1, 1}) == 0.0);
    // two points: slope is rise over run
    const double two_point = (0.302 - 0.556) / (0.1 - 0.0);
    CHECK(two_point == doctest::Approx(-2.54));
    CHECK(linear_slope(std::vector<double>{0, 0.1}, std::vector<double>{0.556, 0.302}) ==
          doctest::Approx(two_point).epsilon(1e-12));

    SUBCASE("constant y gives an exact zero") {
        const std::vector<double> x{0.31, 0.32, 0.337, 0.35, 0.36};
        const std::vector<double> y(5, 0.55);
        CHECK(linear_slope(x, y) == 0.0);
    }
    SUBCASE("degenerate inputs") {
        CHECK_THROWS_AS(linear_slope(std::vector<double>{1}, std::vector<double>{1}), Error);
        CHECK_THROWS_AS(linear_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), Error);
        try {
            linear_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2});
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::degenerate_regression);
        }
    }
    SUBCASE("shift and scale invariance") {
        std::mt19937_64 g(99);
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = test_util::random_values(g, 12, 0.0, 1.0);
            auto y = test_util::random_values(g, 12, 0.0, 1.0);
            const double s = linear_slope(x, y);
            auto shifted = y;
            for (auto& v : shifted) v += 0.25;
            auto scaled = y;
            for (auto& v : scaled) v *= 3.0;
            CHECK(linear_slope(x, shifted) == doctest::Approx(s).epsilon(1e-9));
            CHECK(linear_slope(x, scaled) == doctest::Approx(3.0 * s).epsilon(1e-9));
        }
    }
}

TEST_CASE("max_consecutive_rises") {
    CHECK(max_consecutive_rises(std::vector<double>{1, 2, 3, 4}) == 3);
    CHECK(max_consecutive_rises(std::vector<double>{4, 3, 2, 1}) == 0);
    CHECK(max_consecutive_rises(std::vector<double>{1, 2, 2, 3}) == 1);
    CHECK(max_consecutive_rises(std::vector<double>{}) == 0);
    CHECK(max_consecutive_rises(std::vector<double>{5}) == 0);

    std::mt19937_64 g(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = test_util::random_values(g, 20, 0.0, 1.0);
        std::sort(v.begin(), v.end());
        std::reverse(v.begin(), v.end());
        CHECK(max_consecutive_rises(v) == 0);
    }
}

TEST_CASE("quantile uses linear interpolation") {
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == 3.0);
    CHECK(quantile({1, 2, 3, 4}, 0.9) == doctest::Approx(3.7));
    CHECK(quantile({0.5, 0.5, 0.5}, 0.9) == 0.5);
    CHECK(quantile({2.0}, 0.9) == 2.0);
}

TEST_CASE("DegradationConfig defaults and validation") {
    DegradationConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.peak_window == 5);
    CHECK(cfg.min_peak_height == 0.3);
    CHECK(cfg.cliff_theta == 0.30);
    CHECK(cfg.t_max == 131072);
    CHECK(cfg.trend_window == 50);

    auto bad = cfg;
    bad.peak_window = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.rebound_threshold = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.peak_range = {0.6, 0.3};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.cliff_theta = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.region_boundaries = {0.5, 0.4};
    CHECK_THROWS_AS(bad.validate(), Error);
}
