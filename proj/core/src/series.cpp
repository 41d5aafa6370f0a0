#include "cliffpoint/series.hpp"

#include "cliffpoint/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cliffpoint {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_config: return "invalid-config";
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::empty_series: return "empty-series";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::degenerate_regression: return "degenerate-regression";
        case ErrorKind::degenerate_statistics: return "degenerate-statistics";
        case ErrorKind::undefined_correlation: return "undefined-correlation";
        case ErrorKind::division_by_zero: return "division-by-zero";
        case ErrorKind::invalid_reference: return "invalid-reference";
        case ErrorKind::invalid_matrix: return "invalid-matrix";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

std::vector<double> PerformanceSeries::ratios() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.ratio);
    return out;
}

std::vector<double> PerformanceSeries::performances() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.performance);
    return out;
}

namespace {

void check(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::invalid_config, what);
}

bool unit_range(const Range& r) {
    return r.lo <= r.hi && r.lo >= 0.0 && r.hi <= 1.0;
}

}  // namespace

void DegradationConfig::validate() const {
    check(t_max > 0, "t_max must be positive");
    check(peak_window >= 1, "peak_window must be >= 1");
    check(post_min >= 1 && post_max >= 1, "post_min/post_max must be >= 1");
    check(post_min <= post_max, "post_min must not exceed post_max");
    check(drop_window >= 1, "drop_window must be >= 1");
    check(consecutive_rise_run >= 1, "consecutive_rise_run must be >= 1");
    check(n_bins >= 1, "n_bins must be >= 1");
    check(ma_window >= 1, "ma_window must be >= 1");
    check(trend_window >= 1, "trend_window must be >= 1");
    check(unit_range(peak_range), "peak_range must be ordered within [0,1]");
    check(unit_range(bin_search_range), "bin_search_range must be ordered within [0,1]");
    check(rise_range_width > 0.0 && rise_range_width <= 1.0, "rise_range_width must be in (0,1]");
    check(rebound_threshold > 0.0 && rebound_threshold < 1.0, "rebound_threshold must be in (0,1)");
    check(cliff_theta > 0.0 && cliff_theta < 1.0, "cliff_theta must be in (0,1)");
    check(percentile_cut > 0.0 && percentile_cut < 1.0, "percentile_cut must be in (0,1)");
    check(bin_drop_min >= 0.0 && bin_drop_min < 1.0, "bin_drop_min must be in [0,1)");
    check(std::isfinite(min_peak_height), "min_peak_height must be finite");
    check(!region_boundaries.empty(), "region_boundaries must not be empty");
    check(std::is_sorted(region_boundaries.begin(), region_boundaries.end()) &&
              region_boundaries.front() > 0.0 && region_boundaries.back() <= 1.0,
          "region_boundaries must be sorted within (0,1]");
}

double compute_ratio(std::int64_t token_count, std::int64_t t_max) {
    if (t_max <= 0) throw Error(ErrorKind::invalid_config, "t_max must be positive");
    if (token_count < 0) throw Error(ErrorKind::invalid_input, "token_count must be nonnegative");
    return static_cast<double>(token_count) / static_cast<double>(t_max);
}

PerformanceSeries preprocess(const PerformanceSeries& series) {
    PerformanceSeries out;
    out.summary.input_points = series.size();

    std::vector<SeriesPoint> kept;
    kept.reserve(series.size());
    for (const auto& p : series.points) {
        if (p.performance == 0.0 || p.performance == 1.0) {
            ++out.summary.removed_extreme;
            continue;
        }
        kept.push_back(p);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.ratio < b.ratio; });

    for (std::size_t i = 0; i < kept.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < kept.size() && kept[j].ratio == kept[i].ratio) sum += kept[j++].performance;
        const auto count = j - i;
        out.points.push_back({kept[i].ratio, count == 1 ? kept[i].performance : sum / static_cast<double>(count)});
        out.summary.merged_duplicates += count - 1;
        if (kept[i].ratio > 1.0) ++out.summary.ratio_above_one;
        i = j;
    }

    std::ostringstream tag;
    if (!series.provenance.empty()) tag << series.provenance << "; ";
    tag << "preprocess(removed=" << out.summary.removed_extreme
        << ", merged=" << out.summary.merged_duplicates << ")";
    out.provenance = tag.str();
    return out;
}

void require_nonempty(const PerformanceSeries& series) {
    if (series.empty()) throw Error(ErrorKind::empty_series, "series has no points");
}

std::vector<double> moving_average(std::span<const double> values, int window) {
    if (window < 1) throw Error(ErrorKind::invalid_config, "moving average window must be >= 1");
    const auto w = static_cast<std::size_t>(window);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t k = lo; k <= i; ++k) sum += values[k];
        out[i] = sum / static_cast<double>(i + 1 - lo);
    }
    return out;
}

double linear_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::invalid_input, "x and y lengths differ");
    if (x.size() < 2) throw Error(ErrorKind::degenerate_regression, "need at least two points");
    const double x_bar = mean(x);
    // Centering y on its first element keeps a constant y at an exact zero slope.
    const double y0 = y[0];
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - x_bar;
        sxy += dx * (y[i] - y0);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw Error(ErrorKind::degenerate_regression, "x has zero variance");
    return sxy / sxx;
}

double linear_slope(std::span<const SeriesPoint> points) {
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
        x.push_back(p.ratio);
        y.push_back(p.performance);
    }
    return linear_slope(x, y);
}

int max_consecutive_rises(std::span<const double> values) {
    int best = 0;
    int run = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        run = values[i] > values[i - 1] ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "mean of empty sequence");
    // Shifting by the first value makes the mean of a constant sequence exact.
    const double origin = values.front();
    double sum = 0.0;
    for (double v : values) sum += v - origin;
    return origin + sum / static_cast<double>(values.size());
}

namespace {

double sum_sq_dev(std::span<const double> values) {
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss;
}

}  // namespace

double sample_std(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorKind::insufficient_data, "sample std needs two values");
    return std::sqrt(sum_sq_dev(values) / static_cast<double>(values.size() - 1));
}

double population_std(std::span<const double> values) {
    return std::sqrt(sum_sq_dev(values) / static_cast<double>(values.size()));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "quantile of empty sequence");
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::invalid_config, "quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace cliffpoint
