#pragma once

// Critical-threshold detection: the shared three-stage peak strategy
// (multi-peak detection, rise-in-range filtering, sustained-decline
// verification), the five estimators built on it, and median aggregation.

#include "cliffpoint/series.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cliffpoint {

struct PeakCandidate {
    double ratio = 0.0;
    double performance = 0.0;
    std::size_t index = 0;
};

enum class Stage2Status { kept, excluded };
enum class ExclusionReason { none, value_exceeds_peak, consecutive_rises, rising_trend };
enum class Stage3Status { not_run, sustained, non_sustained, unverifiable };

std::string_view to_string(ExclusionReason reason);
std::string_view to_string(Stage3Status status);

/// Audit trail for a single peak through Stages 2 and 3.
struct PeakVerdict {
    PeakCandidate candidate;
    Stage2Status stage2 = Stage2Status::kept;
    ExclusionReason reason = ExclusionReason::none;
    Stage3Status stage3 = Stage3Status::not_run;
    std::size_t post_points = 0;
    double rebound_fraction = 0.0;
    double post_slope = 0.0;
    int post_rise_run = 0;
    double drop_pct = 0.0;
};

enum class Method { gradient, second_derivative, binned, percentile, sliding_window };

inline constexpr std::array<Method, 5> all_methods{Method::gradient, Method::second_derivative, Method::binned,
                                                   Method::percentile, Method::sliding_window};

std::string_view to_string(Method method);

struct ThresholdEstimate {
    Method method = Method::gradient;
    bool detected = false;
    double threshold_ratio = 0.0;
    double drop_pct = 0.0;
    std::optional<PeakVerdict> selected_peak;
    std::vector<PeakVerdict> audit;
    std::string note;  // why nothing was detected, or other diagnostics
};

enum class Agreement { high, medium, low };

std::string_view to_string(Agreement level);

struct CrossValidationResult {
    bool detected = false;
    double final_threshold = 0.0;
    double mean = 0.0;
    std::optional<double> std_sample;
    std::optional<double> std_population;
    double min = 0.0;
    double max = 0.0;
    Agreement consistency = Agreement::low;
    Agreement confidence = Agreement::low;
    double coverage = 0.0;
    std::vector<ThresholdEstimate> per_method;
    std::vector<PeakVerdict> all_candidates;
};

/// Stage 1. Throws Error(insufficient_data) when the series has fewer than
/// 2w+1 points.
std::vector<PeakCandidate> detect_local_peaks(const PerformanceSeries& series, const DegradationConfig& cfg);

struct RiseFilterResult {
    std::vector<PeakVerdict> kept;
    std::vector<PeakVerdict> excluded;
};

/// Stage 2. Exclusion reasons are tested in a fixed order: exceed, rises, trend.
RiseFilterResult filter_rise_in_range(const PerformanceSeries& series, std::span<const PeakCandidate> peaks,
                                      const DegradationConfig& cfg);

/// Stage 3 for one Stage-2 survivor.
PeakVerdict verify_sustained_decline(const PerformanceSeries& series, const PeakVerdict& peak,
                                     const DegradationConfig& cfg);

/// Most negative discrete second difference of performance centred on the
/// peak and on each of its first post_min successors.
double min_second_difference(const PerformanceSeries& series, std::size_t peak_index, int post_min);

ThresholdEstimate method_gradient(const PerformanceSeries& series, const DegradationConfig& cfg);
ThresholdEstimate method_second_derivative(const PerformanceSeries& series, const DegradationConfig& cfg);
ThresholdEstimate method_binned(const PerformanceSeries& series, const DegradationConfig& cfg);
ThresholdEstimate method_percentile(const PerformanceSeries& series, const DegradationConfig& cfg);
ThresholdEstimate method_sliding_window(const PerformanceSeries& series, const DegradationConfig& cfg);

ThresholdEstimate run_method(Method method, const PerformanceSeries& series, const DegradationConfig& cfg);

/// All five methods, in canonical order. Methods run concurrently.
std::vector<ThresholdEstimate> run_all_methods(const PerformanceSeries& series, const DegradationConfig& cfg);

/// Median aggregation over the detected estimates. Requires exactly one
/// estimate per method; throws Error(invalid_input) otherwise.
CrossValidationResult cross_validate(std::vector<ThresholdEstimate> estimates);

/// Agreement grade for a spread of estimates: < 0.05 high, < 0.10 medium.
Agreement grade_spread(std::optional<double> sigma);

}  // namespace cliffpoint
