#include "cliffpoint/analysis.hpp"

#include "cliffpoint/error.hpp"
#include "cliffpoint/random.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace cliffpoint {

double degradation_rate(double i_at, double i_next) {
    if (i_at == 0.0) throw Error(ErrorKind::division_by_zero, "degradation rate at zero performance");
    return (i_at - i_next) / i_at;
}

CliffEvidence classify_cliff(const PerformanceSeries& series, double r_c, const DegradationConfig& cfg) {
    cfg.validate();
    std::vector<double> below, above;
    for (const auto& p : series.points) (p.ratio <= r_c ? below : above).push_back(p.performance);
    if (below.empty() || above.empty()) {
        throw Error(ErrorKind::insufficient_data, "cliff classification needs points on both sides of r_c");
    }

    // Series is sorted, so the nearest points are the tail of `below` and the head of `above`.
    const auto w = static_cast<std::size_t>(cfg.drop_window);
    const auto n_below = std::min(w, below.size());
    const auto n_above = std::min(w, above.size());

    CliffEvidence ev;
    ev.near_points = std::min(n_below, n_above);
    ev.near_below_mean = mean(std::span<const double>(below).last(n_below));
    ev.near_above_mean = mean(std::span<const double>(above).first(n_above));
    ev.below_mean = mean(below);
    ev.above_mean = mean(above);
    ev.degradation = degradation_rate(ev.near_below_mean, ev.near_above_mean);
    ev.abrupt = ev.degradation > cfg.cliff_theta;
    ev.persistent = ev.above_mean < 0.5 * ev.below_mean;
    ev.cliff = ev.abrupt && ev.persistent;
    return ev;
}

std::vector<RegionStats> region_stats(const PerformanceSeries& series, std::span<const double> boundaries) {
    if (boundaries.empty() || !std::is_sorted(boundaries.begin(), boundaries.end()) || boundaries.front() <= 0.0 ||
        boundaries.back() > 1.0) {
        throw Error(ErrorKind::invalid_config, "region boundaries must be sorted within (0,1]");
    }
    static constexpr const char* three_names[] = {"stable", "transition", "degraded"};

    std::vector<RegionStats> regions;
    double lo = 0.0;
    for (std::size_t k = 0; k < boundaries.size(); ++k) {
        RegionStats r;
        r.name = boundaries.size() == 3 ? three_names[k] : "region_" + std::to_string(k);
        r.lo = lo;
        r.hi = boundaries[k];
        r.closed = k + 1 == boundaries.size();
        lo = boundaries[k];

        std::vector<double> values;
        for (const auto& p : series.points) {
            if (p.ratio >= r.lo && (p.ratio < r.hi || (r.closed && p.ratio == r.hi))) values.push_back(p.performance);
        }
        r.n = values.size();
        if (!values.empty()) {
            r.mean = mean(values);
            r.min = *std::min_element(values.begin(), values.end());
            r.max = *std::max_element(values.begin(), values.end());
            if (values.size() >= 2) r.std = sample_std(values);
        }
        regions.push_back(std::move(r));
    }
    return regions;
}

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // sample variance
};

Moments moments(std::span<const double> v) {
    Moments m;
    m.mean = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.var = ss / static_cast<double>(v.size() - 1);
    return m;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
    const auto ma = moments(a);
    const auto mb = moments(b);
    const double se2 = ma.var / static_cast<double>(a.size()) + mb.var / static_cast<double>(b.size());
    const double diff = ma.mean - mb.mean;
    if (se2 == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    return diff / std::sqrt(se2);
}

}  // namespace

TwoSampleResult two_sample_test(std::span<const double> a, std::span<const double> b, int permutations,
                                std::uint64_t seed) {
    if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::insufficient_data, "each sample needs >= 2 values");
    if (permutations < 1) throw Error(ErrorKind::invalid_config, "permutations must be >= 1");

    const auto ma = moments(a);
    const auto mb = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled = std::sqrt(((na - 1) * ma.var + (nb - 1) * mb.var) / (na + nb - 2));

    TwoSampleResult out;
    out.permutations = permutations;
    out.p_floor = 1.0 / (permutations + 1);
    if (pooled == 0.0) {
        if (ma.mean != mb.mean) {
            throw Error(ErrorKind::degenerate_statistics, "zero pooled standard deviation with unequal means");
        }
        return out;  // t = 0, d = 0, p = 1
    }
    out.d = (ma.mean - mb.mean) / pooled;
    out.t = welch_t(a, b);

    std::vector<double> pool(a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    const double observed = std::abs(out.t);
    Rng rng(seed);
    int extreme = 0;
    for (int i = 0; i < permutations; ++i) {
        rng.shuffle(std::span<double>(pool));
        const auto pa = std::span<const double>(pool).first(a.size());
        const auto pb = std::span<const double>(pool).subspan(a.size());
        if (std::abs(welch_t(pa, pb)) >= observed * (1.0 - 1e-12)) ++extreme;
    }
    out.p = static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);
    return out;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::invalid_input, "x and y lengths differ");
    if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "correlation needs at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::undefined_correlation, "zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult region_correlation(const PerformanceSeries& series, double lo, double hi, bool closed,
                                     int permutations, std::uint64_t seed) {
    if (permutations < 1) throw Error(ErrorKind::invalid_config, "permutations must be >= 1");
    std::vector<double> x, y;
    for (const auto& p : series.points) {
        if (p.ratio >= lo && (p.ratio < hi || (closed && p.ratio == hi))) {
            x.push_back(p.ratio);
            y.push_back(p.performance);
        }
    }
    if (x.size() < 3) throw Error(ErrorKind::insufficient_data, "correlation needs at least three points in region");

    CorrelationResult out;
    out.n = x.size();
    out.permutations = permutations;
    out.r = pearson_r(x, y);

    const double observed = std::abs(out.r);
    Rng rng(seed);
    int extreme = 0;
    for (int i = 0; i < permutations; ++i) {
        rng.shuffle(std::span<double>(y));
        // Tolerance absorbs summation-order rounding when a shuffle reproduces the observed pairing.
        if (std::abs(pearson_r(x, y)) >= observed - 1e-12) ++extreme;
    }
    out.p = static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);
    return out;
}

RegionReport build_region_report(const PerformanceSeries& series, const DegradationConfig& cfg, int permutations,
                                 std::uint64_t seed) {
    RegionReport report;
    report.regions = region_stats(series, cfg.region_boundaries);

    auto values_in = [&](const RegionStats& r) {
        std::vector<double> v;
        for (const auto& p : series.points) {
            if (p.ratio >= r.lo && (p.ratio < r.hi || (r.closed && p.ratio == r.hi))) v.push_back(p.performance);
        }
        return v;
    };

    if (report.regions.size() >= 2) {
        const auto a = values_in(report.regions.front());
        const auto b = values_in(report.regions.back());
        try {
            report.stable_vs_degraded = two_sample_test(a, b, permutations, seed);
        } catch (const Error&) {
            // too few points or degenerate spread; left absent
        }
    }
    for (const auto& r : report.regions) {
        try {
            report.correlations.push_back(region_correlation(series, r.lo, r.hi, r.closed, permutations, seed));
        } catch (const Error&) {
            report.correlations.push_back(std::nullopt);
        }
    }
    return report;
}

std::string_view to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::peak_window: return "peak_window";
        case SweepParameter::rise_range_width: return "rise_range_width";
        case SweepParameter::rebound_threshold: return "rebound_threshold";
    }
    return "peak_window";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
    if (name == "peak_window" || name == "w") return SweepParameter::peak_window;
    if (name == "rise_range_width" || name == "rise_range") return SweepParameter::rise_range_width;
    if (name == "rebound_threshold" || name == "rebound") return SweepParameter::rebound_threshold;
    throw Error(ErrorKind::invalid_config, "unknown sweep parameter: " + std::string(name));
}

DegradationConfig with_parameter(DegradationConfig cfg, SweepParameter parameter, double value) {
    switch (parameter) {
        case SweepParameter::peak_window:
            if (value != std::floor(value) || value < 1) {
                throw Error(ErrorKind::invalid_config, "peak_window grid values must be positive integers");
            }
            cfg.peak_window = static_cast<int>(value);
            break;
        case SweepParameter::rise_range_width: cfg.rise_range_width = value; break;
        case SweepParameter::rebound_threshold: cfg.rebound_threshold = value; break;
    }
    cfg.validate();
    return cfg;
}

SensitivityReport sensitivity_sweep(const PerformanceSeries& series, const DegradationConfig& cfg,
                                    SweepParameter parameter, std::span<const double> grid) {
    if (grid.empty()) throw Error(ErrorKind::invalid_config, "sensitivity grid is empty");
    std::vector<DegradationConfig> configs;
    for (double v : grid) configs.push_back(with_parameter(cfg, parameter, v));
    cfg.validate();
    require_nonempty(series);

    auto final_threshold = [&series](const DegradationConfig& c) -> std::optional<double> {
        auto cv = cross_validate(run_all_methods(series, c));
        if (!cv.detected) return std::nullopt;
        return cv.final_threshold;
    };

    std::vector<std::future<std::optional<double>>> pending;
    for (const auto& c : configs) pending.push_back(std::async(std::launch::async, final_threshold, std::cref(c)));

    SensitivityReport report;
    report.parameter = parameter;
    report.grid.assign(grid.begin(), grid.end());
    report.default_threshold = final_threshold(cfg);
    report.all_detected = report.default_threshold.has_value();
    for (auto& f : pending) {
        report.thresholds.push_back(f.get());
        const auto& t = report.thresholds.back();
        if (!t) report.all_detected = false;
        if (t && report.default_threshold) {
            const double dev = std::abs(*t - *report.default_threshold);
            report.max_abs_deviation = std::max(report.max_abs_deviation.value_or(0.0), dev);
        }
    }
    return report;
}

}  // namespace cliffpoint
