#include "cliffpoint/report.hpp"

#include "cliffpoint/error.hpp"

#include <cstdio>

namespace cliffpoint {

Emit parse_emit(std::string_view name) {
    if (name == "json") return Emit::json;
    if (name == "md") return Emit::md;
    throw Error(ErrorKind::invalid_config, "unknown output kind: " + std::string(name));
}

std::string percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
    return buf;
}

std::string fixed4(double ratio) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", ratio);
    return buf;
}

namespace {

template <typename T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

std::string opt4(const std::optional<double>& v) { return v ? fixed4(*v) : "-"; }

}  // namespace

TheoryPrediction predict_theory(const TheoryInputs& inputs) {
    TheoryPrediction t;
    t.rope = inputs.rope;
    if (inputs.rope) {
        t.rope_period = rope_period(inputs.rope->theta);
        t.rope_threshold = rope_threshold(*inputs.rope);
    }
    if (inputs.attention) {
        t.attention_length = inputs.attention->length();
        t.attention_concentration = attention_concentration(*inputs.attention);
        t.attention_entropy = attention_entropy(*inputs.attention);
    }
    t.l_attention = inputs.l_attention;
    t.l_info = inputs.l_info;
    if (t.rope_threshold || t.l_attention || t.l_info) {
        t.unified = unified_threshold(t.rope_threshold, t.l_attention, t.l_info);
    }
    return t;
}

RunReport run_detect(const PerformanceSeries& series, const DegradationConfig& cfg, const RunOptions& options) {
    cfg.validate();
    require_nonempty(series);

    RunReport report;
    report.config = cfg;
    report.options = options;
    report.preprocessing = series.summary;
    report.series_points = series.size();
    report.cross_validation = cross_validate(run_all_methods(series, cfg));
    if (report.cross_validation.detected) {
        try {
            report.cliff = classify_cliff(series, report.cross_validation.final_threshold, cfg);
        } catch (const Error& e) {
            report.warnings.push_back(std::string("cliff classification skipped: ") + e.what());
        }
    }
    report.regions = build_region_report(series, cfg, options.permutations, options.seed);
    return report;
}

RunReport run_detect(const IngestResult& input, const DegradationConfig& cfg, const RunOptions& options) {
    auto report = run_detect(input.series, cfg, options);
    report.input_digest = input.digest;
    report.warnings.insert(report.warnings.begin(), input.warnings.begin(), input.warnings.end());
    return report;
}

Json to_json(const DegradationConfig& cfg) {
    Json j;
    j["t_max"] = cfg.t_max;
    j["peak_window"] = cfg.peak_window;
    j["min_peak_height"] = cfg.min_peak_height;
    j["peak_range"] = {cfg.peak_range.lo, cfg.peak_range.hi};
    j["rise_range_width"] = cfg.rise_range_width;
    j["rebound_threshold"] = cfg.rebound_threshold;
    j["post_min"] = cfg.post_min;
    j["post_max"] = cfg.post_max;
    j["drop_window"] = cfg.drop_window;
    j["consecutive_rise_run"] = cfg.consecutive_rise_run;
    j["n_bins"] = cfg.n_bins;
    j["bin_search_range"] = {cfg.bin_search_range.lo, cfg.bin_search_range.hi};
    j["bin_drop_min"] = cfg.bin_drop_min;
    j["percentile_cut"] = cfg.percentile_cut;
    j["ma_window"] = cfg.ma_window;
    j["cliff_theta"] = cfg.cliff_theta;
    j["region_boundaries"] = cfg.region_boundaries;
    j["trend_window"] = cfg.trend_window;
    return j;
}

Json to_json(const PeakVerdict& v) {
    Json j;
    j["ratio"] = v.candidate.ratio;
    j["performance"] = v.candidate.performance;
    j["index"] = v.candidate.index;
    j["stage2"] = v.stage2 == Stage2Status::kept ? "kept" : "excluded";
    j["reason"] = v.stage2 == Stage2Status::kept ? Json(nullptr) : Json(to_string(v.reason));
    j["stage3"] = to_string(v.stage3);
    if (v.stage3 != Stage3Status::not_run) {
        j["post_points"] = v.post_points;
        j["rebound_fraction"] = v.rebound_fraction;
        j["post_slope"] = v.post_slope;
        j["post_rise_run"] = v.post_rise_run;
        j["drop_pct"] = v.drop_pct;
    }
    return j;
}

Json to_json(const ThresholdEstimate& e) {
    Json j;
    j["method"] = to_string(e.method);
    j["detected"] = e.detected;
    j["threshold_ratio"] = e.threshold_ratio;
    j["drop_pct"] = e.drop_pct;
    j["selected_peak"] = e.selected_peak ? to_json(*e.selected_peak) : Json(nullptr);
    j["note"] = e.note;
    Json audit = Json::array();
    for (const auto& v : e.audit) audit.push_back(to_json(v));
    j["audit"] = std::move(audit);
    return j;
}

Json to_json(const CrossValidationResult& cv) {
    Json j;
    j["detected"] = cv.detected;
    j["final_threshold"] = cv.detected ? Json(cv.final_threshold) : Json(nullptr);
    j["mean"] = cv.detected ? Json(cv.mean) : Json(nullptr);
    j["std_sample"] = opt(cv.std_sample);
    j["std_population"] = opt(cv.std_population);
    j["min"] = cv.detected ? Json(cv.min) : Json(nullptr);
    j["max"] = cv.detected ? Json(cv.max) : Json(nullptr);
    j["consistency"] = to_string(cv.consistency);
    j["confidence"] = to_string(cv.confidence);
    j["coverage"] = cv.coverage;
    Json methods = Json::array();
    for (const auto& e : cv.per_method) methods.push_back(to_json(e));
    j["methods"] = std::move(methods);
    j["candidate_count"] = cv.all_candidates.size();
    return j;
}

Json to_json(const RegionReport& r) {
    Json j;
    Json regions = Json::array();
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        const auto& s = r.regions[i];
        Json rj;
        rj["name"] = s.name;
        rj["lo"] = s.lo;
        rj["hi"] = s.hi;
        rj["hi_inclusive"] = s.closed;
        rj["n"] = s.n;
        rj["mean"] = opt(s.mean);
        rj["std"] = opt(s.std);
        rj["min"] = opt(s.min);
        rj["max"] = opt(s.max);
        if (i < r.correlations.size() && r.correlations[i]) {
            rj["pearson_r"] = r.correlations[i]->r;
            rj["pearson_p"] = r.correlations[i]->p;
        } else {
            rj["pearson_r"] = nullptr;
            rj["pearson_p"] = nullptr;
        }
        regions.push_back(std::move(rj));
    }
    j["regions"] = std::move(regions);
    if (r.stable_vs_degraded) {
        const auto& t = *r.stable_vs_degraded;
        j["stable_vs_degraded"] = {{"welch_t", t.t}, {"p", t.p}, {"cohens_d", t.d},
                                   {"permutations", t.permutations}, {"p_floor", t.p_floor}};
    } else {
        j["stable_vs_degraded"] = nullptr;
    }
    return j;
}

Json to_json(const SensitivityReport& s) {
    Json j;
    j["parameter"] = to_string(s.parameter);
    j["grid"] = s.grid;
    Json th = Json::array();
    for (const auto& t : s.thresholds) th.push_back(opt(t));
    j["final_thresholds"] = std::move(th);
    j["default_threshold"] = opt(s.default_threshold);
    j["max_abs_deviation"] = opt(s.max_abs_deviation);
    j["all_detected"] = s.all_detected;
    return j;
}

Json to_json(const TheoryPrediction& t) {
    Json j;
    if (t.rope) {
        j["rope"] = {{"theta", t.rope->theta}, {"alpha", t.rope->alpha}, {"t_max", t.rope->t_max},
                     {"period_tokens", opt(t.rope_period)}, {"threshold_ratio", opt(t.rope_threshold)}};
    } else {
        j["rope"] = nullptr;
    }
    if (t.attention_length) {
        j["attention"] = {{"length", *t.attention_length},
                          {"concentration", opt(t.attention_concentration)},
                          {"entropy_nats", opt(t.attention_entropy)}};
    } else {
        j["attention"] = nullptr;
    }
    j["l_attention"] = opt(t.l_attention);
    j["l_info"] = opt(t.l_info);
    if (t.unified) {
        j["unified"] = {{"ratio", t.unified->ratio}, {"bottleneck", to_string(t.unified->bottleneck)}};
    } else {
        j["unified"] = nullptr;
    }
    return j;
}

Json to_json(const RunReport& report) {
    Json j;
    j["tool"] = {{"name", tool_name}, {"version", tool_version}};
    j["input_digest"] = report.input_digest.empty() ? Json(nullptr) : Json(report.input_digest);
    j["config"] = to_json(report.config);
    j["options"] = {{"permutations", report.options.permutations}, {"seed", report.options.seed}};
    j["preprocessing"] = {{"input_points", report.preprocessing.input_points},
                          {"removed_extreme", report.preprocessing.removed_extreme},
                          {"merged_duplicates", report.preprocessing.merged_duplicates},
                          {"ratio_above_one", report.preprocessing.ratio_above_one},
                          {"series_points", report.series_points}};
    j["warnings"] = report.warnings;
    j["cross_validation"] = to_json(report.cross_validation);
    if (report.cliff) {
        const auto& c = *report.cliff;
        j["cliff"] = {{"cliff", c.cliff},
                      {"abrupt", c.abrupt},
                      {"persistent", c.persistent},
                      {"degradation", c.degradation},
                      {"near_below_mean", c.near_below_mean},
                      {"near_above_mean", c.near_above_mean},
                      {"below_mean", c.below_mean},
                      {"above_mean", c.above_mean}};
    } else {
        j["cliff"] = nullptr;
    }
    j["regions"] = to_json(report.regions);
    j["sensitivity"] = report.sensitivity ? to_json(*report.sensitivity) : Json(nullptr);
    j["theory"] = report.theory ? to_json(*report.theory) : Json(nullptr);
    return j;
}

Json to_json(const F1Breakdown& f) {
    Json j;
    j["f1"] = f.f1;
    j["matched_by"] = to_string(f.matched_by);
    j["token_precision"] = f.token_precision;
    j["token_recall"] = f.token_recall;
    j["token_f1"] = f.token_f1;
    j["char_precision"] = f.char_precision;
    j["char_recall"] = f.char_recall;
    j["char_f1"] = f.char_f1;
    return j;
}

Json to_json(const SynthTruth& truth) {
    const auto& c = truth.config;
    Json j;
    j["cliff_ratio"] = opt(truth.cliff_ratio);
    Json cfg;
    cfg["n_points"] = c.n_points;
    cfg["cliff_ratio"] = opt(c.cliff_ratio);
    cfg["p_high"] = c.p_high;
    cfg["p_low"] = c.p_low;
    cfg["transition_width"] = c.transition_width;
    cfg["noise_sigma"] = c.noise_sigma;
    if (const auto* b = std::get_if<BimodalRatios>(&c.ratio_distribution)) {
        cfg["ratio_distribution"] = {{"kind", "bimodal"},
                                     {"short_mean", b->short_mean},
                                     {"short_std", b->short_std},
                                     {"long_mean", b->long_mean},
                                     {"long_std", b->long_std},
                                     {"short_weight", b->short_weight}};
    } else {
        cfg["ratio_distribution"] = {{"kind", "uniform"}};
    }
    cfg["seed"] = c.seed;
    j["config"] = std::move(cfg);
    Json regions = Json::array();
    for (const auto& r : truth.region_means) {
        regions.push_back({{"name", r.name}, {"lo", r.lo}, {"hi", r.hi}, {"mean", r.mean}});
    }
    j["region_means"] = std::move(regions);
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void render_markdown(std::ostream& out, const RegionReport& r) {
    out << "| Region | Range | n | Mean | Std | Min | Max | Pearson r | p |\n"
        << "|---|---|---|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        const auto& s = r.regions[i];
        out << "| " << s.name << " | " << percent(s.lo) << "-" << percent(s.hi) << " | " << s.n << " | "
            << opt4(s.mean) << " | " << opt4(s.std) << " | " << opt4(s.min) << " | " << opt4(s.max) << " | ";
        if (i < r.correlations.size() && r.correlations[i]) {
            out << fixed4(r.correlations[i]->r) << " | " << fixed4(r.correlations[i]->p) << " |\n";
        } else {
            out << "- | - |\n";
        }
    }
    if (r.stable_vs_degraded) {
        const auto& t = *r.stable_vs_degraded;
        out << "\nFirst vs last region: Welch t = " << fixed4(t.t) << ", permutation p = " << fixed4(t.p)
            << " (resolution " << fixed4(t.p_floor) << ", " << t.permutations << " permutations), Cohen's d = "
            << fixed4(t.d) << "\n";
    }
}

void render_markdown(std::ostream& out, const SensitivityReport& s) {
    out << "## Sensitivity: " << to_string(s.parameter) << "\n\n"
        << "| Value | Final threshold | Deviation |\n|---|---|---|\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        out << "| " << format_double(s.grid[i]) << " | " << opt4(s.thresholds[i]) << " | ";
        if (s.thresholds[i] && s.default_threshold) {
            out << fixed4(std::abs(*s.thresholds[i] - *s.default_threshold));
        } else {
            out << "-";
        }
        out << " |\n";
    }
    out << "\nDefault threshold: " << opt4(s.default_threshold) << "; max deviation: " << opt4(s.max_abs_deviation)
        << "\n";
}

void render_markdown(std::ostream& out, const TheoryPrediction& t) {
    out << "## Theoretical predictions\n\n";
    if (t.rope) {
        out << "- RoPE period (theta = " << format_double(t.rope->theta) << "): " << format_double(*t.rope_period)
            << " tokens\n"
            << "- RoPE threshold (alpha = " << format_double(t.rope->alpha) << ", t_max = " << t.rope->t_max
            << "): " << fixed4(*t.rope_threshold) << " (" << percent(*t.rope_threshold) << ")\n";
    }
    if (t.attention_length) {
        out << "- Attention concentration (L = " << *t.attention_length << "): " << fixed4(*t.attention_concentration)
            << "\n- Attention entropy: " << fixed4(*t.attention_entropy) << " nats\n";
    }
    if (t.unified) {
        out << "- Unified threshold: " << fixed4(t.unified->ratio) << " (" << percent(t.unified->ratio)
            << "), bottleneck: " << to_string(t.unified->bottleneck) << "\n";
    }
}

void render_markdown(std::ostream& out, const RunReport& report) {
    const auto& cv = report.cross_validation;
    out << "# Critical threshold report\n\n"
        << "Tool: " << tool_name << " " << tool_version << "\n";
    if (!report.input_digest.empty()) out << "Input SHA-256: " << report.input_digest << "\n";
    out << "Points: " << report.series_points << " (input " << report.preprocessing.input_points << ", removed "
        << report.preprocessing.removed_extreme << ", merged " << report.preprocessing.merged_duplicates << ")\n\n";

    out << "## Threshold detection\n\n"
        << "| Method | Detected | Threshold | Drop |\n|---|---|---|---|\n";
    for (const auto& e : cv.per_method) {
        out << "| " << to_string(e.method) << " | " << (e.detected ? "yes" : "no") << " | "
            << (e.detected ? percent(e.threshold_ratio) : "-") << " | " << (e.detected ? percent(e.drop_pct) : "-")
            << " |\n";
    }
    if (cv.detected) {
        out << "| **Median (final)** | | **" << percent(cv.final_threshold) << "** | |\n"
            << "| Mean | | " << percent(cv.mean) << " | |\n";
        if (cv.std_sample) out << "| Std dev (sample) | | " << percent(*cv.std_sample) << " | |\n";
        if (cv.std_population) out << "| Std dev (population) | | " << percent(*cv.std_population) << " | |\n";
        out << "\nFinal threshold " << fixed4(cv.final_threshold) << " (range " << fixed4(cv.min) << "-"
            << fixed4(cv.max) << "), consistency " << to_string(cv.consistency) << ", confidence "
            << to_string(cv.confidence) << ", coverage " << percent(cv.coverage) << "\n";
    } else {
        out << "\nNo threshold detected (coverage " << percent(cv.coverage) << ").\n";
    }
    if (report.cliff) {
        const auto& c = *report.cliff;
        out << "\nCliff at final threshold: " << (c.cliff ? "yes" : "no") << " (degradation "
            << percent(c.degradation) << ", above/below mean " << fixed4(c.above_mean) << "/" << fixed4(c.below_mean)
            << ")\n";
    }

    out << "\n## Peak audit\n\n| Method | Ratio | Performance | Stage 2 | Stage 3 | Drop |\n|---|---|---|---|---|---|\n";
    for (const auto& e : cv.per_method) {
        for (const auto& v : e.audit) {
            out << "| " << to_string(e.method) << " | " << fixed4(v.candidate.ratio) << " | "
                << fixed4(v.candidate.performance) << " | "
                << (v.stage2 == Stage2Status::kept ? std::string("kept") : std::string(to_string(v.reason))) << " | "
                << to_string(v.stage3) << " | "
                << (v.stage3 == Stage3Status::not_run ? std::string("-") : percent(v.drop_pct)) << " |\n";
        }
    }

    out << "\n## Regions\n\n";
    render_markdown(out, report.regions);
    if (report.sensitivity) {
        out << "\n";
        render_markdown(out, *report.sensitivity);
    }
    if (report.theory) {
        out << "\n";
        render_markdown(out, *report.theory);
    }
    if (!report.warnings.empty()) {
        out << "\n## Warnings\n\n";
        for (const auto& w : report.warnings) out << "- " << w << "\n";
    }
}

void write_plot_points(std::ostream& out, const PerformanceSeries& series) {
    out << "ratio,performance\n";
    for (const auto& p : series.points) out << format_double(p.ratio) << ',' << format_double(p.performance) << '\n';
}

void write_plot_trend(std::ostream& out, const PerformanceSeries& series, const DegradationConfig& cfg) {
    const auto trend = moving_average(series.performances(), cfg.trend_window);
    out << "ratio,trend\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.points[i].ratio) << ',' << format_double(trend[i]) << '\n';
    }
}

}  // namespace cliffpoint
