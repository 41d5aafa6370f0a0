#pragma once

// Domain types shared by every stage of the pipeline, plus the small numeric
// helpers (slopes, rise runs, moving averages) that the detectors build on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cliffpoint {

/// One evaluation sample as it arrives from an input file.
///
/// Exactly one of token_count / ratio is normally supplied; the other is
/// derived from DegradationConfig::t_max. Performance is either given or
/// computed from the prediction/reference pair.
struct SampleRecord {
    std::string id;
    std::optional<std::int64_t> token_count;
    std::optional<double> ratio;
    std::optional<double> performance;
    std::optional<std::string> prediction;
    std::optional<std::string> reference;
};

struct SeriesPoint {
    double ratio = 0.0;
    double performance = 0.0;

    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct PreprocessSummary {
    std::size_t input_points = 0;
    std::size_t removed_extreme = 0;  // performance exactly 0 or 1
    std::size_t merged_duplicates = 0;
    std::size_t ratio_above_one = 0;  // kept, but reported

    friend bool operator==(const PreprocessSummary&, const PreprocessSummary&) = default;
};

struct PerformanceSeries {
    std::vector<SeriesPoint> points;
    std::string provenance;
    PreprocessSummary summary;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    std::vector<double> ratios() const;
    std::vector<double> performances() const;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

/// Every tunable of the detection pipeline. Defaults are the published values.
struct DegradationConfig {
    std::int64_t t_max = 131072;
    int peak_window = 5;
    double min_peak_height = 0.3;
    Range peak_range{0.30, 0.60};
    double rise_range_width = 0.10;
    double rebound_threshold = 0.85;
    int post_min = 10;
    int post_max = 50;
    int drop_window = 30;
    int consecutive_rise_run = 3;
    int n_bins = 20;
    Range bin_search_range{0.35, 0.55};
    double bin_drop_min = 0.05;
    double percentile_cut = 0.90;
    int ma_window = 5;
    double cliff_theta = 0.30;
    std::vector<double> region_boundaries{0.40, 0.50, 0.95};
    int trend_window = 50;

    /// Throws Error(invalid_config) on the first violated invariant.
    void validate() const;

    friend bool operator==(const DegradationConfig&, const DegradationConfig&) = default;
};

double compute_ratio(std::int64_t token_count, std::int64_t t_max);

/// Drops P == 0 / P == 1 points, sorts by ratio and merges duplicate ratios
/// by mean performance. Idempotent.
PerformanceSeries preprocess(const PerformanceSeries& series);

/// Throws Error(empty_series) when the series has no points.
void require_nonempty(const PerformanceSeries& series);

/// Trailing moving average; the window shrinks at the left edge so the output
/// has the same length as the input.
std::vector<double> moving_average(std::span<const double> values, int window);

/// Ordinary least-squares slope of y on x.
double linear_slope(std::span<const double> x, std::span<const double> y);
double linear_slope(std::span<const SeriesPoint> points);

/// Longest run of strictly positive successive differences.
int max_consecutive_rises(std::span<const double> values);

double mean(std::span<const double> values);
double sample_std(std::span<const double> values);
double population_std(std::span<const double> values);

/// Linear-interpolation quantile (the "type 7" definition), q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace cliffpoint
