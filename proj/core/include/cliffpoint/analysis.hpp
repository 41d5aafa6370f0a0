#pragma once

// Degradation metrics, per-region statistics, significance tests and
// parameter-sensitivity sweeps over a preprocessed series.

#include "cliffpoint/detection.hpp"
#include "cliffpoint/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cliffpoint {

inline constexpr int default_permutations = 10000;
inline constexpr std::uint64_t default_permutation_seed = 42;

/// Fractional loss between two performance levels: (i_at - i_next) / i_at.
double degradation_rate(double i_at, double i_next);

struct CliffEvidence {
    bool cliff = false;
    bool abrupt = false;      // near-side degradation rate exceeds theta
    bool persistent = false;  // far-side mean below half the near-side mean
    double degradation = 0.0;
    double near_below_mean = 0.0;
    double near_above_mean = 0.0;
    double below_mean = 0.0;
    double above_mean = 0.0;
    std::size_t near_points = 0;
};

/// Points with ratio <= r_c are "below", ratio > r_c "above". The near-side
/// means use the drop_window points closest to r_c on each side.
CliffEvidence classify_cliff(const PerformanceSeries& series, double r_c, const DegradationConfig& cfg);

struct RegionStats {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    bool closed = false;  // true when hi is inclusive
    std::size_t n = 0;
    std::optional<double> mean;
    std::optional<double> std;
    std::optional<double> min;
    std::optional<double> max;
};

struct TwoSampleResult {
    double t = 0.0;
    double p = 1.0;
    double d = 0.0;
    int permutations = 0;
    double p_floor = 0.0;  // 1 / (permutations + 1)
};

struct CorrelationResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    int permutations = 0;
};

struct RegionReport {
    std::vector<RegionStats> regions;
    std::optional<TwoSampleResult> stable_vs_degraded;
    std::vector<std::optional<CorrelationResult>> correlations;  // one per region
};

/// Regions [0, b0), [b0, b1), ..., [b_{k-2}, b_{k-1}]; the last is closed.
/// With three boundaries the regions are named stable/transition/degraded.
std::vector<RegionStats> region_stats(const PerformanceSeries& series, std::span<const double> boundaries);

/// Welch t, two-sided permutation p and pooled-std Cohen's d.
TwoSampleResult two_sample_test(std::span<const double> a, std::span<const double> b,
                                int permutations = default_permutations,
                                std::uint64_t seed = default_permutation_seed);

double pearson_r(std::span<const double> x, std::span<const double> y);

CorrelationResult region_correlation(const PerformanceSeries& series, double lo, double hi, bool closed = false,
                                     int permutations = default_permutations,
                                     std::uint64_t seed = default_permutation_seed);

/// Statistics for every region, the first-vs-last region test, and per-region
/// correlations (absent where a region is too small or degenerate).
RegionReport build_region_report(const PerformanceSeries& series, const DegradationConfig& cfg,
                                 int permutations = default_permutations,
                                 std::uint64_t seed = default_permutation_seed);

enum class SweepParameter { peak_window, rise_range_width, rebound_threshold };

std::string_view to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(std::string_view name);

struct SensitivityReport {
    SweepParameter parameter = SweepParameter::peak_window;
    std::vector<double> grid;
    std::vector<std::optional<double>> thresholds;  // final threshold per grid value
    std::optional<double> default_threshold;
    std::optional<double> max_abs_deviation;  // over grid values where both sides detected
    bool all_detected = false;
};

DegradationConfig with_parameter(DegradationConfig cfg, SweepParameter parameter, double value);

/// Reruns the five-method pipeline for each grid value.
SensitivityReport sensitivity_sweep(const PerformanceSeries& series, const DegradationConfig& cfg,
                                    SweepParameter parameter, std::span<const double> grid);

}  // namespace cliffpoint
