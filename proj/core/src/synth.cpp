#include "cliffpoint/synth.hpp"

#include "cliffpoint/error.hpp"
#include "cliffpoint/random.hpp"

#include <algorithm>
#include <cmath>

namespace cliffpoint {

namespace {

constexpr double clamp_margin = 1e-6;

void check(bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::invalid_config, what);
}

double draw_ratio(Rng& src, const RatioDistribution& dist) {
    if (std::holds_alternative<UniformRatios>(dist)) return src.uniform();
    const auto& b = std::get<BimodalRatios>(dist);
    const bool short_mode = src.uniform() < b.short_weight;
    for (;;) {
        const double r = short_mode ? src.gaussian(b.short_mean, b.short_std) : src.gaussian(b.long_mean, b.long_std);
        if (r > 0.0 && r < 1.0) return r;
    }
}

double curve_mean(const SynthConfig& cfg, double lo, double hi) {
    constexpr int steps = 20000;
    double sum = 0.0;
    for (int i = 0; i < steps; ++i) sum += synth_curve(cfg, lo + (hi - lo) * (i + 0.5) / steps);
    return sum / steps;
}

}  // namespace

void SynthConfig::validate() const {
    check(n_points >= 1, "n_points must be >= 1");
    check(p_high > 0.0 && p_high < 1.0, "p_high must be in (0,1)");
    check(noise_sigma >= 0.0, "noise_sigma must be >= 0");
    check(transition_width >= 0.0, "transition_width must be >= 0");
    if (cliff_ratio) {
        check(p_low > 0.0 && p_low < 1.0, "p_low must be in (0,1)");
        check(p_high > p_low, "p_high must exceed p_low");
        check(*cliff_ratio - transition_width / 2 > 0.0 && *cliff_ratio + transition_width / 2 < 1.0,
              "cliff transition must lie inside (0,1)");
    }
    if (const auto* b = std::get_if<BimodalRatios>(&ratio_distribution)) {
        check(b->short_std > 0.0 && b->long_std > 0.0, "bimodal spreads must be positive");
        check(b->short_weight >= 0.0 && b->short_weight <= 1.0, "bimodal weight must be in [0,1]");
    }
}

double synth_curve(const SynthConfig& cfg, double ratio) {
    if (!cfg.cliff_ratio) return cfg.p_high;
    const double start = *cfg.cliff_ratio - cfg.transition_width / 2;
    const double stop = *cfg.cliff_ratio + cfg.transition_width / 2;
    if (ratio < start) return cfg.p_high;
    if (ratio >= stop) return cfg.p_low;
    return cfg.p_high + (cfg.p_low - cfg.p_high) * (ratio - start) / (stop - start);
}

SynthOutput generate_series(const SynthConfig& cfg) {
    cfg.validate();
    Rng src(cfg.seed);

    SynthOutput out;
    out.series.points.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
        const double r = draw_ratio(src, cfg.ratio_distribution);
        double p = synth_curve(cfg, r);
        if (cfg.noise_sigma > 0.0) p = src.gaussian(p, cfg.noise_sigma);
        p = std::clamp(p, clamp_margin, 1.0 - clamp_margin);
        out.series.points.push_back({r, p});
    }
    std::stable_sort(out.series.points.begin(), out.series.points.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.ratio < b.ratio; });
    out.series.provenance = "synth(seed=" + std::to_string(cfg.seed) + ")";
    out.series.summary.input_points = out.series.size();

    out.truth.config = cfg;
    out.truth.cliff_ratio = cfg.cliff_ratio;
    if (!cfg.cliff_ratio) {
        out.truth.region_means.push_back({"flat", 0.0, 1.0, cfg.p_high});
    } else {
        const double start = *cfg.cliff_ratio - cfg.transition_width / 2;
        const double stop = *cfg.cliff_ratio + cfg.transition_width / 2;
        out.truth.region_means.push_back({"stable", 0.0, start, cfg.p_high});
        if (stop > start) out.truth.region_means.push_back({"transition", start, stop, curve_mean(cfg, start, stop)});
        out.truth.region_means.push_back({"degraded", stop, 1.0, cfg.p_low});
    }
    return out;
}

OracleRecord oracle_score(const CrossValidationResult& detected, const SynthTruth& truth, double tol) {
    OracleRecord rec;
    rec.truth = truth.cliff_ratio;
    rec.tolerance = tol;
    if (detected.detected) rec.detected = detected.final_threshold;
    for (const auto& e : detected.per_method) {
        if (!e.detected) continue;
        ++rec.methods_detected;
        if (truth.cliff_ratio && std::abs(e.threshold_ratio - *truth.cliff_ratio) <= tol) {
            rec.method_hits.push_back(e.method);
        }
    }
    if (!truth.cliff_ratio) {
        rec.false_positive = detected.detected;
        rec.pass = !detected.detected;
    } else {
        rec.pass = detected.detected && std::abs(detected.final_threshold - *truth.cliff_ratio) <= tol;
    }
    return rec;
}

}  // namespace cliffpoint
