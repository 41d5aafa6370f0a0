#pragma once

// Run orchestration and report rendering. Machine output is JSON with a fixed
// key order and shortest round-trip numbers; human output is Markdown with
// ratios to 4 decimals and percentages to 1 decimal.

#include "cliffpoint/analysis.hpp"
#include "cliffpoint/detection.hpp"
#include "cliffpoint/records.hpp"
#include "cliffpoint/scoring.hpp"
#include "cliffpoint/synth.hpp"
#include "cliffpoint/theory.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cliffpoint {

inline constexpr std::string_view tool_name = "cliffpoint";
inline constexpr std::string_view tool_version = "0.1.0";

using Json = nlohmann::ordered_json;

enum class Emit { json, md };

Emit parse_emit(std::string_view name);

struct TheoryInputs {
    std::optional<RopeParams> rope;
    std::optional<double> l_attention;
    std::optional<double> l_info;
    std::optional<AttentionMatrix> attention;
};

struct TheoryPrediction {
    std::optional<RopeParams> rope;
    std::optional<double> rope_period;
    std::optional<double> rope_threshold;
    std::optional<double> attention_concentration;
    std::optional<double> attention_entropy;
    std::optional<std::size_t> attention_length;
    std::optional<UnifiedThreshold> unified;
    std::optional<double> l_attention;
    std::optional<double> l_info;
};

TheoryPrediction predict_theory(const TheoryInputs& inputs);

struct RunOptions {
    int permutations = default_permutations;
    std::uint64_t seed = default_permutation_seed;
};

struct RunReport {
    DegradationConfig config;
    PreprocessSummary preprocessing;
    std::size_t series_points = 0;
    std::string input_digest;
    std::vector<std::string> warnings;
    CrossValidationResult cross_validation;  // per-method estimates live here
    std::optional<CliffEvidence> cliff;      // Def.-style classification at the final threshold
    RegionReport regions;
    std::optional<SensitivityReport> sensitivity;
    std::optional<TheoryPrediction> theory;
    RunOptions options;
};

/// Runs all five methods, aggregates them and computes region statistics.
/// Throws Error(empty_series) on an empty series; "nothing detected" is a
/// normal report.
RunReport run_detect(const PerformanceSeries& series, const DegradationConfig& cfg, const RunOptions& options = {});

RunReport run_detect(const IngestResult& input, const DegradationConfig& cfg, const RunOptions& options = {});

Json to_json(const DegradationConfig& cfg);
Json to_json(const PeakVerdict& v);
Json to_json(const ThresholdEstimate& e);
Json to_json(const CrossValidationResult& cv);
Json to_json(const RegionReport& r);
Json to_json(const SensitivityReport& s);
Json to_json(const TheoryPrediction& t);
Json to_json(const RunReport& report);
Json to_json(const F1Breakdown& f);
Json to_json(const SynthTruth& truth);

/// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);

void render_markdown(std::ostream& out, const RunReport& report);
void render_markdown(std::ostream& out, const RegionReport& regions);
void render_markdown(std::ostream& out, const SensitivityReport& s);
void render_markdown(std::ostream& out, const TheoryPrediction& t);

/// Two-column CSVs for plotting: (ratio, performance) and (ratio, trend),
/// where trend is the moving average with cfg.trend_window.
void write_plot_points(std::ostream& out, const PerformanceSeries& series);
void write_plot_trend(std::ostream& out, const PerformanceSeries& series, const DegradationConfig& cfg);

std::string percent(double fraction);  // "43.2%"
std::string fixed4(double ratio);      // "0.4320"

}  // namespace cliffpoint
