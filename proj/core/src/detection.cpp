#include "cliffpoint/detection.hpp"

#include "cliffpoint/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace cliffpoint {

std::string_view to_string(ExclusionReason reason) {
    switch (reason) {
        case ExclusionReason::none: return "none";
        case ExclusionReason::value_exceeds_peak: return "value_exceeds_peak";
        case ExclusionReason::consecutive_rises: return "consecutive_rises";
        case ExclusionReason::rising_trend: return "rising_trend";
    }
    return "none";
}

std::string_view to_string(Stage3Status status) {
    switch (status) {
        case Stage3Status::not_run: return "not_run";
        case Stage3Status::sustained: return "sustained";
        case Stage3Status::non_sustained: return "non_sustained";
        case Stage3Status::unverifiable: return "unverifiable";
    }
    return "not_run";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::gradient: return "gradient";
        case Method::second_derivative: return "second_derivative";
        case Method::binned: return "binned";
        case Method::percentile: return "percentile";
        case Method::sliding_window: return "sliding_window";
    }
    return "gradient";
}

std::string_view to_string(Agreement level) {
    switch (level) {
        case Agreement::high: return "high";
        case Agreement::medium: return "medium";
        case Agreement::low: return "low";
    }
    return "low";
}

std::vector<PeakCandidate> detect_local_peaks(const PerformanceSeries& series, const DegradationConfig& cfg) {
    const auto& pts = series.points;
    const auto w = static_cast<std::size_t>(cfg.peak_window);
    if (pts.size() < 2 * w + 1) {
        std::ostringstream msg;
        msg << "peak detection needs at least " << 2 * w + 1 << " points, got " << pts.size();
        throw Error(ErrorKind::insufficient_data, msg.str());
    }

    std::vector<PeakCandidate> peaks;
    for (std::size_t i = w; i + w < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!cfg.peak_range.contains(p.ratio) || p.performance < cfg.min_peak_height) continue;
        bool is_peak = true;
        for (std::size_t k = i - w; k <= i + w && is_peak; ++k) {
            if (k != i && pts[k].performance > p.performance) is_peak = false;
        }
        if (is_peak) peaks.push_back({p.ratio, p.performance, i});
    }
    return peaks;
}

RiseFilterResult filter_rise_in_range(const PerformanceSeries& series, std::span<const PeakCandidate> peaks,
                                      const DegradationConfig& cfg) {
    const auto& pts = series.points;
    RiseFilterResult out;
    for (const auto& peak : peaks) {
        PeakVerdict verdict;
        verdict.candidate = peak;

        const double limit = peak.ratio + cfg.rise_range_width;
        std::vector<SeriesPoint> window;
        for (std::size_t j = peak.index + 1; j < pts.size() && pts[j].ratio <= limit; ++j) {
            if (pts[j].ratio > peak.ratio) window.push_back(pts[j]);
        }

        if (!window.empty()) {
            std::vector<double> values;
            values.reserve(window.size());
            for (const auto& p : window) values.push_back(p.performance);

            if (std::any_of(values.begin(), values.end(), [&](double v) { return v > peak.performance; })) {
                verdict.reason = ExclusionReason::value_exceeds_peak;
            } else if (max_consecutive_rises(values) >= cfg.consecutive_rise_run) {
                verdict.reason = ExclusionReason::consecutive_rises;
            } else if (window.size() >= 2 && linear_slope(window) > 0.0) {
                verdict.reason = ExclusionReason::rising_trend;
            }
        }

        if (verdict.reason == ExclusionReason::none) {
            out.kept.push_back(verdict);
        } else {
            verdict.stage2 = Stage2Status::excluded;
            out.excluded.push_back(verdict);
        }
    }
    return out;
}

PeakVerdict verify_sustained_decline(const PerformanceSeries& series, const PeakVerdict& peak,
                                     const DegradationConfig& cfg) {
    const auto& pts = series.points;
    PeakVerdict out = peak;
    const double p_peak = peak.candidate.performance;

    const std::size_t begin = peak.candidate.index + 1;
    const std::size_t end = std::min(begin + static_cast<std::size_t>(cfg.post_max), pts.size());
    std::vector<SeriesPoint> post(pts.begin() + static_cast<std::ptrdiff_t>(std::min(begin, pts.size())),
                                  pts.begin() + static_cast<std::ptrdiff_t>(std::max(begin, end)));
    out.post_points = post.size();

    std::vector<double> values;
    values.reserve(post.size());
    for (const auto& p : post) values.push_back(p.performance);

    if (!values.empty()) {
        const auto n_drop = std::min(values.size(), static_cast<std::size_t>(cfg.drop_window));
        out.drop_pct = (p_peak - mean(std::span<const double>(values).first(n_drop))) / p_peak;
        out.rebound_fraction = *std::max_element(values.begin(), values.end()) / p_peak;
        out.post_rise_run = max_consecutive_rises(values);
    }
    if (post.size() >= 2) out.post_slope = linear_slope(post);

    if (post.size() < static_cast<std::size_t>(cfg.post_min)) {
        out.stage3 = Stage3Status::unverifiable;
    } else if (out.rebound_fraction < cfg.rebound_threshold && out.post_slope < 0.0 &&
               out.post_rise_run < cfg.consecutive_rise_run) {
        out.stage3 = Stage3Status::sustained;
    } else {
        out.stage3 = Stage3Status::non_sustained;
    }
    return out;
}

double min_second_difference(const PerformanceSeries& series, std::size_t peak_index, int post_min) {
    const auto& pts = series.points;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = peak_index; c <= peak_index + static_cast<std::size_t>(post_min) - 1; ++c) {
        if (c == 0 || c + 1 >= pts.size()) continue;
        const double d2 = pts[c + 1].performance - 2.0 * pts[c].performance + pts[c - 1].performance;
        best = std::min(best, d2);
    }
    return best;
}

namespace {

struct Staged {
    std::vector<PeakVerdict> audit;     // every Stage-1 candidate, in index order
    std::vector<PeakVerdict> verified;  // Stage-2 survivors after Stage 3
};

Staged run_stages(const PerformanceSeries& series, std::span<const PeakCandidate> peaks,
                  const DegradationConfig& cfg) {
    Staged staged;
    auto filtered = filter_rise_in_range(series, peaks, cfg);
    for (const auto& v : filtered.kept) staged.verified.push_back(verify_sustained_decline(series, v, cfg));

    staged.audit = staged.verified;
    staged.audit.insert(staged.audit.end(), filtered.excluded.begin(), filtered.excluded.end());
    std::sort(staged.audit.begin(), staged.audit.end(),
              [](const PeakVerdict& a, const PeakVerdict& b) { return a.candidate.index < b.candidate.index; });
    return staged;
}

// Returns the verdict with the largest drop; earliest index wins ties.
const PeakVerdict* max_drop(const std::vector<const PeakVerdict*>& pool) {
    const PeakVerdict* best = nullptr;
    for (const auto* v : pool) {
        if (best == nullptr || v->drop_pct > best->drop_pct) best = v;
    }
    return best;
}

enum class Preference { max_drop, steepest_acceleration };

ThresholdEstimate select_threshold(Method method, const PerformanceSeries& series, Staged staged,
                                   const DegradationConfig& cfg, Preference preference) {
    ThresholdEstimate est;
    est.method = method;

    std::vector<const PeakVerdict*> sustained, all;
    for (const auto& v : staged.verified) {
        all.push_back(&v);
        if (v.stage3 == Stage3Status::sustained) sustained.push_back(&v);
    }

    const PeakVerdict* chosen = nullptr;
    if (!sustained.empty() && preference == Preference::steepest_acceleration) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<const PeakVerdict*> tied;
        for (const auto* v : sustained) {
            const double d2 = min_second_difference(series, v->candidate.index, cfg.post_min);
            if (d2 < best) {
                best = d2;
                tied.assign(1, v);
            } else if (d2 == best) {
                tied.push_back(v);
            }
        }
        chosen = max_drop(tied);
    } else if (!sustained.empty()) {
        chosen = max_drop(sustained);
    } else {
        chosen = max_drop(all);
    }

    if (chosen == nullptr) {
        est.note = staged.audit.empty() ? "no local peak in the candidate range" : "every peak excluded by rise-in-range filter";
    } else {
        est.selected_peak = *chosen;
        est.threshold_ratio = chosen->candidate.ratio;
        est.drop_pct = chosen->drop_pct;
        est.detected = chosen->drop_pct > cfg.cliff_theta;
        if (!est.detected) est.note = "selected peak drop does not exceed cliff_theta";
    }
    est.audit = std::move(staged.audit);
    return est;
}

ThresholdEstimate multi_peak(Method method, const PerformanceSeries& series, const DegradationConfig& cfg,
                             Preference preference, std::optional<double> min_performance = std::nullopt) {
    cfg.validate();
    require_nonempty(series);
    std::vector<PeakCandidate> peaks;
    try {
        peaks = detect_local_peaks(series, cfg);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::insufficient_data) throw;
        ThresholdEstimate est;
        est.method = method;
        est.note = e.what();
        return est;
    }
    if (min_performance) {
        std::erase_if(peaks, [&](const PeakCandidate& p) { return p.performance < *min_performance; });
    }
    return select_threshold(method, series, run_stages(series, peaks, cfg), cfg, preference);
}

}  // namespace

ThresholdEstimate method_gradient(const PerformanceSeries& series, const DegradationConfig& cfg) {
    return multi_peak(Method::gradient, series, cfg, Preference::max_drop);
}

ThresholdEstimate method_second_derivative(const PerformanceSeries& series, const DegradationConfig& cfg) {
    return multi_peak(Method::second_derivative, series, cfg, Preference::steepest_acceleration);
}

ThresholdEstimate method_percentile(const PerformanceSeries& series, const DegradationConfig& cfg) {
    cfg.validate();
    require_nonempty(series);
    std::vector<double> region;
    for (const auto& p : series.points) {
        if (cfg.peak_range.contains(p.ratio)) region.push_back(p.performance);
    }
    if (region.empty()) {
        ThresholdEstimate est;
        est.method = Method::percentile;
        est.note = "no points in the candidate range";
        return est;
    }
    return multi_peak(Method::percentile, series, cfg, Preference::max_drop, quantile(region, cfg.percentile_cut));
}

ThresholdEstimate method_sliding_window(const PerformanceSeries& series, const DegradationConfig& cfg) {
    cfg.validate();
    require_nonempty(series);
    const auto smoothed_values = moving_average(series.performances(), cfg.ma_window);
    PerformanceSeries smoothed;
    smoothed.provenance = series.provenance + "; moving_average";
    smoothed.points.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        smoothed.points.push_back({series.points[i].ratio, smoothed_values[i]});
    }
    return multi_peak(Method::sliding_window, smoothed, cfg, Preference::max_drop);
}

ThresholdEstimate method_binned(const PerformanceSeries& series, const DegradationConfig& cfg) {
    cfg.validate();
    require_nonempty(series);
    ThresholdEstimate est;
    est.method = Method::binned;

    const auto n_bins = static_cast<std::size_t>(cfg.n_bins);
    std::vector<double> sums(n_bins, 0.0);
    std::vector<std::size_t> counts(n_bins, 0);
    for (const auto& p : series.points) {
        if (p.ratio < 0.0 || p.ratio > 1.0) continue;
        const auto k = std::min(n_bins - 1, static_cast<std::size_t>(p.ratio * static_cast<double>(n_bins)));
        sums[k] += p.performance;
        ++counts[k];
    }
    auto center = [&](std::size_t k) { return (static_cast<double>(k) + 0.5) / static_cast<double>(n_bins); };
    auto bin_mean = [&](std::size_t k) { return sums[k] / static_cast<double>(counts[k]); };

    std::optional<std::size_t> peak_bin;
    for (std::size_t k = 0; k < n_bins; ++k) {
        if (counts[k] == 0 || !cfg.bin_search_range.contains(center(k))) continue;
        // Equal means (up to summation rounding) resolve to the rightmost bin,
        // the one nearest the decline.
        if (!peak_bin || bin_mean(k) >= bin_mean(*peak_bin) - 1e-12 * std::abs(bin_mean(*peak_bin))) peak_bin = k;
    }
    if (!peak_bin) {
        est.note = "no nonempty bin in the search range";
        return est;
    }

    const double peak = bin_mean(*peak_bin);
    std::vector<double> post;
    for (std::size_t k = *peak_bin + 1; k <= *peak_bin + 3 && k < n_bins; ++k) {
        if (counts[k] > 0) post.push_back(bin_mean(k));
    }
    est.threshold_ratio = center(*peak_bin);
    if (post.empty()) {
        est.note = "no nonempty bin after the peak bin";
        return est;
    }

    const double post_mean = mean(post);
    const double post_max = *std::max_element(post.begin(), post.end());
    est.drop_pct = (peak - post_mean) / peak;
    est.detected = est.drop_pct > cfg.bin_drop_min && post_mean < 0.9 * peak && post_max < 0.95 * peak;

    std::ostringstream note;
    note << "peak bin mean " << peak << ", next-bin mean " << post_mean << ", next-bin max " << post_max;
    est.note = note.str();
    return est;
}

ThresholdEstimate run_method(Method method, const PerformanceSeries& series, const DegradationConfig& cfg) {
    switch (method) {
        case Method::gradient: return method_gradient(series, cfg);
        case Method::second_derivative: return method_second_derivative(series, cfg);
        case Method::binned: return method_binned(series, cfg);
        case Method::percentile: return method_percentile(series, cfg);
        case Method::sliding_window: return method_sliding_window(series, cfg);
    }
    throw Error(ErrorKind::invalid_input, "unknown method");
}

std::vector<ThresholdEstimate> run_all_methods(const PerformanceSeries& series, const DegradationConfig& cfg) {
    cfg.validate();
    require_nonempty(series);
    std::vector<std::future<ThresholdEstimate>> pending;
    pending.reserve(all_methods.size());
    for (auto m : all_methods) {
        pending.push_back(std::async(std::launch::async, [m, &series, &cfg] { return run_method(m, series, cfg); }));
    }
    std::vector<ThresholdEstimate> out;
    out.reserve(pending.size());
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

Agreement grade_spread(std::optional<double> sigma) {
    if (!sigma) return Agreement::low;
    if (*sigma < 0.05) return Agreement::high;
    if (*sigma < 0.10) return Agreement::medium;
    return Agreement::low;
}

CrossValidationResult cross_validate(std::vector<ThresholdEstimate> estimates) {
    if (estimates.size() != all_methods.size()) {
        throw Error(ErrorKind::invalid_input, "cross-validation needs exactly one estimate per method");
    }
    std::sort(estimates.begin(), estimates.end(),
              [](const ThresholdEstimate& a, const ThresholdEstimate& b) { return a.method < b.method; });
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (estimates[i].method != all_methods[i]) {
            throw Error(ErrorKind::invalid_input, "cross-validation needs exactly one estimate per method");
        }
    }

    CrossValidationResult out;
    std::vector<double> values;
    for (const auto& e : estimates) {
        if (e.detected) values.push_back(e.threshold_ratio);
        if (e.method != Method::binned) {
            out.all_candidates.insert(out.all_candidates.end(), e.audit.begin(), e.audit.end());
        }
    }
    out.per_method = std::move(estimates);
    out.coverage = static_cast<double>(values.size()) / static_cast<double>(all_methods.size());
    if (values.empty()) return out;

    std::sort(values.begin(), values.end());
    const auto n = values.size();
    out.detected = true;
    out.final_threshold = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    out.mean = mean(values);
    out.min = values.front();
    out.max = values.back();
    out.std_population = population_std(values);
    if (n >= 2) out.std_sample = sample_std(values);
    out.consistency = grade_spread(out.std_sample);
    out.confidence = out.consistency;
    return out;
}

}  // namespace cliffpoint
