#pragma once

// Synthetic degradation curves with a known cliff, used as ground truth for
// the detectors.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Uniform doubles take the top 53 bits of each draw,
// offset by half an ulp so they lie strictly inside (0,1); Gaussian draws
// are produced by inverse-transform sampling of those uniforms. The same
// seed therefore reproduces the same series on any conforming platform.

#include "cliffpoint/detection.hpp"
#include "cliffpoint/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cliffpoint {

struct UniformRatios {};

struct BimodalRatios {
    double short_mean = 0.072;
    double short_std = 0.018;
    double long_mean = 0.683;
    double long_std = 0.187;
    double short_weight = 0.5;
};

using RatioDistribution = std::variant<UniformRatios, BimodalRatios>;

struct SynthConfig {
    int n_points = 1000;
    std::optional<double> cliff_ratio = 0.45;  // nullopt generates a flat series
    double p_high = 0.55;
    double p_low = 0.30;
    double transition_width = 0.0;
    double noise_sigma = 0.0;
    RatioDistribution ratio_distribution = UniformRatios{};
    std::uint64_t seed = 42;

    void validate() const;
};

struct SynthRegionMean {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
};

struct SynthTruth {
    SynthConfig config;
    std::optional<double> cliff_ratio;
    std::vector<SynthRegionMean> region_means;
};

struct SynthOutput {
    PerformanceSeries series;
    SynthTruth truth;
};

/// Noise-free performance at a given ratio.
double synth_curve(const SynthConfig& cfg, double ratio);

SynthOutput generate_series(const SynthConfig& cfg);

struct OracleRecord {
    bool pass = false;
    bool false_positive = false;
    std::optional<double> truth;
    std::optional<double> detected;
    double tolerance = 0.0;
    std::vector<Method> method_hits;  // methods whose own estimate lands within tolerance
    int methods_detected = 0;
};

OracleRecord oracle_score(const CrossValidationResult& detected, const SynthTruth& truth, double tol);

}  // namespace cliffpoint
