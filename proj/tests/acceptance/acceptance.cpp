// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cliffpoint/analysis.hpp"
#include "cliffpoint/detection.hpp"
#include "cliffpoint/records.hpp"
#include "cliffpoint/report.hpp"
#include "cliffpoint/scoring.hpp"
#include "cliffpoint/synth.hpp"
#include "cliffpoint/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cliffpoint;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ThresholdEstimate estimate(Method m, double r) {
    ThresholdEstimate e;
    e.method = m;
    e.detected = true;
    e.threshold_ratio = r;
    return e;
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto cv = cross_validate({estimate(Method::gradient, 0.425), estimate(Method::second_derivative, 0.432),
                                    estimate(Method::binned, 0.450), estimate(Method::percentile, 0.418),
                                    estimate(Method::sliding_window, 0.445)});
    const double elapsed = seconds_since(t0);
    o.require(cv.detected, "not detected");
    o.require(near(cv.final_threshold, 0.4320, 1e-12), "median " + fmt(cv.final_threshold));
    o.require(near(cv.mean, 0.4340, 1e-12), "mean " + fmt(cv.mean));
    o.require(cv.std_sample && near(*cv.std_sample, 0.0134, 0.0001), "sample sd " + fmt(cv.std_sample.value_or(-1)));
    o.require(cv.std_population && near(*cv.std_population, 0.0120, 0.0001),
              "population sd " + fmt(cv.std_population.value_or(-1)));
    o.require(cv.consistency == Agreement::high, "consistency " + std::string(to_string(cv.consistency)));
    o.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
    if (o.pass) o.detail = "median 0.4320, mean 0.4340, sd " + fmt(*cv.std_sample) + "/" + fmt(*cv.std_population);
    return o;
}

Outcome criterion2() {
    Outcome o;
    const double d = degradation_rate(0.556, 0.302);
    o.require(near(d, 0.4568, 0.0001), "degradation_rate " + fmt(d));

    SynthConfig sc;
    sc.cliff_ratio = 0.45;
    sc.p_high = 0.565;
    sc.p_low = 0.278;
    const auto series = generate_series(sc).series;
    DegradationConfig cfg;
    double r_c = 0.0;
    for (const auto& p : series.points) {
        if (p.ratio < 0.45) r_c = p.ratio;
    }
    const auto ev = classify_cliff(series, r_c, cfg);
    o.require(ev.cliff, "classification false");
    o.require(near(ev.degradation, 0.508, 0.005), "D " + fmt(ev.degradation));
    if (o.pass) o.detail = "rate " + fmt(d) + ", D " + fmt(ev.degradation);
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto t0 = Clock::now();
    const DegradationConfig cfg;
    std::mt19937_64 pick(20240301);
    std::uniform_real_distribution<double> cliff_dist(0.35, 0.55);
    int hits = 0;
    int all_five = 0;
    std::array<int, 5> per_method{};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SynthConfig sc;
        sc.n_points = 1000;
        sc.cliff_ratio = cliff_dist(pick);
        sc.noise_sigma = 0.02;
        sc.seed = seed;
        const auto synth = generate_series(sc);
        const auto cv = cross_validate(run_all_methods(synth.series, cfg));
        const auto rec = oracle_score(cv, synth.truth, 0.02);
        if (rec.pass) ++hits;
        if (rec.methods_detected == 5) ++all_five;
        for (std::size_t k = 0; k < cv.per_method.size(); ++k) per_method[k] += cv.per_method[k].detected ? 1 : 0;
    }
    const double elapsed = seconds_since(t0);
    o.require(hits >= 95, "within-tolerance runs " + std::to_string(hits) + "/100 (need >= 95)");
    o.require(all_five >= 90, "all-five-detect runs " + std::to_string(all_five) + "/100 (need >= 90)");
    o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
    std::string counts = "per-method detections";
    for (std::size_t k = 0; k < all_methods.size(); ++k) {
        counts += (k == 0 ? " " : ", ") + std::string(to_string(all_methods[k])) + "=" + std::to_string(per_method[k]);
    }
    o.detail += (o.detail.empty() ? "" : "; ") + counts + "; " + fmt(elapsed) + " s";
    return o;
}

Outcome criterion4() {
    Outcome o;
    const DegradationConfig cfg;
    int fired = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SynthConfig sc;
        sc.cliff_ratio.reset();
        sc.noise_sigma = 0.02;
        sc.seed = seed;
        const auto synth = generate_series(sc);
        const auto rec = oracle_score(cross_validate(run_all_methods(synth.series, cfg)), synth.truth, 0.02);
        if (rec.false_positive) ++fired;
    }
    o.require(fired == 0, std::to_string(fired) + " false positives");
    if (o.pass) o.detail = "0/100 flat series fired";
    return o;
}

Outcome criterion5() {
    Outcome o;
    o.require(dual_f1("the capital is Paris", "the capital is Paris").f1 == 1.0, "identity");
    o.require(dual_f1("Answer:  The CAPITAL is paris.", "capital is Paris").f1 == 1.0, "normalized substring");
    o.require(dual_f1("london", "paris").f1 == 0.0, "disjoint");
    o.require(dual_f1("the cat sat", "cat sat down").f1 == 2.0 / 3.0, "cat sat example");

    const std::vector<std::string> vocab{"red", "green", "blue", "cyan", "gold", "grey", "pink", "teal", "navy", "rose"};
    std::mt19937_64 g(42);
    std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
    std::uniform_int_distribution<int> length(1, 7);
    auto sentence = [&] {
        std::vector<std::string> w(static_cast<std::size_t>(length(g)));
        for (auto& s : w) s = vocab[word(g)];
        return w;
    };
    auto join = [](const std::vector<std::string>& w) {
        std::string s;
        for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
        return s;
    };
    int preserved = 0;
    int in_range = 0;
    for (int i = 0; i < 1000; ++i) {
        auto pred = sentence();
        const auto ref = join(sentence());
        const auto base = dual_f1(join(pred), ref);
        std::shuffle(pred.begin(), pred.end(), g);
        const auto perm = dual_f1(join(pred), ref);
        const bool substring = base.matched_by == MatchKind::substring || perm.matched_by == MatchKind::substring;
        if (substring || std::abs(perm.token_f1 - base.token_f1) <= 1e-15) ++preserved;
        bool ok = true;
        for (const auto& f : {base, perm}) {
            for (double v : {f.f1, f.token_precision, f.token_recall, f.token_f1, f.char_precision, f.char_recall,
                             f.char_f1}) {
                ok = ok && v >= 0.0 && v <= 1.0;
            }
        }
        if (ok) ++in_range;
    }
    o.require(preserved == 1000, "permutation cases preserved " + std::to_string(preserved) + "/1000");
    o.require(in_range == 1000, "range violations " + std::to_string(1000 - in_range));
    if (o.pass) o.detail = "examples exact, 1000/1000 permutation cases preserved";
    return o;
}

Outcome criterion6() {
    Outcome o;
    SynthConfig sc;
    sc.noise_sigma = 0.02;
    sc.seed = 42;
    const auto series = generate_series(sc).series;
    const DegradationConfig cfg;
    const std::vector<std::pair<SweepParameter, std::vector<double>>> sweeps{
        {SweepParameter::peak_window, {3, 4, 5, 6, 7}},
        {SweepParameter::rise_range_width, {0.05, 0.10, 0.15}},
        {SweepParameter::rebound_threshold, {0.80, 0.85, 0.90}},
    };
    for (const auto& [param, grid] : sweeps) {
        const auto rep = sensitivity_sweep(series, cfg, param, grid);
        const std::string name(to_string(param));
        o.require(rep.all_detected, name + ": not detected at every grid value");
        const double dev = rep.max_abs_deviation.value_or(0.0);
        o.require(dev <= 0.01, name + ": deviation " + fmt(dev));
        o.detail += (o.detail.empty() ? "" : ", ") + name + " dev " + fmt(dev);
    }
    return o;
}

Outcome criterion7() {
    Outcome o;
    o.require(near(rope_period(1e-4), 62831.85, 0.01), "rope_period " + fmt(rope_period(1e-4)));
    const double rt = rope_threshold({1e-4, 1.0, 131072});
    o.require(near(rt, 0.4794, 0.0001), "rope_threshold " + fmt(rt));
    const auto one_hot = AttentionMatrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
    o.require(attention_concentration(one_hot) == 1.0 && attention_entropy(one_hot) == 0.0, "one-hot metrics");
    const AttentionMatrix uniform(4, std::vector<double>(16, 0.25));
    o.require(attention_concentration(uniform) == 0.25, "uniform C " + fmt(attention_concentration(uniform)));
    o.require(near(attention_entropy(uniform), 1.3863, 0.0001), "uniform H " + fmt(attention_entropy(uniform)));
    o.require(unified_threshold(0.49, 0.43, 0.44).ratio == 0.43, "unified threshold");
    if (o.pass) o.detail = "period " + fmt(rope_period(1e-4)) + ", threshold " + fmt(rt);
    return o;
}

Outcome criterion8() {
    Outcome o;
    const std::vector<double> a{0.9, 1.0, 1.1};
    const std::vector<double> b{0.1, 0.2, 0.3};
    const auto same = two_sample_test(a, a);
    o.require(same.t == 0.0 && same.d == 0.0, "identical samples t=" + fmt(same.t) + " d=" + fmt(same.d));
    const auto sep = two_sample_test(a, b);
    o.require(near(sep.d, 8.0, 0.01), "d " + fmt(sep.d));
    const std::vector<double> x{0.51, 0.48, 0.55, 0.47, 0.52, 0.50};
    const std::vector<double> y{0.44, 0.49, 0.41, 0.46, 0.45};
    const auto p1 = two_sample_test(x, y, 10000, 42);
    const auto p2 = two_sample_test(x, y, 10000, 42);
    o.require(p1.p == p2.p, "permutation p not reproducible");
    std::vector<double> rx, ry;
    for (int i = 0; i < 100; ++i) {
        rx.push_back(i / 100.0);
        ry.push_back(0.8 - 0.5 * rx.back());
    }
    const double r = pearson_r(rx, ry);
    o.require(near(r, -1.0, 1e-9), "pearson " + fmt(r));
    if (o.pass) o.detail = "d " + fmt(sep.d) + ", p " + fmt(p1.p) + " reproduced, r " + fmt(r);
    return o;
}

Outcome criterion9() {
    Outcome o;
    SynthConfig sc;
    sc.noise_sigma = 0.02;
    sc.seed = 42;
    std::ostringstream rec1, rec2;
    write_series_records(rec1, generate_series(sc).series, RecordFormat::csv);
    write_series_records(rec2, generate_series(sc).series, RecordFormat::csv);
    o.require(rec1.str() == rec2.str(), "synth records differ");

    const DegradationConfig cfg;
    const auto in1 = ingest_text(rec1.str(), RecordFormat::csv, cfg);
    const auto in2 = ingest_text(rec1.str(), RecordFormat::csv, cfg);
    const auto j1 = dump(to_json(run_detect(in1, cfg)));
    const auto j2 = dump(to_json(run_detect(in2, cfg)));
    o.require(j1 == j2, "detect reports differ");
    if (o.pass) o.detail = "records " + std::to_string(rec1.str().size()) + " B, report " + std::to_string(j1.size()) + " B identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"cross-validation fixture", criterion1}, {"degradation arithmetic", criterion2},
        {"oracle detection", criterion3},         {"false positives", criterion4},
        {"F1 properties", criterion5},            {"sensitivity stability", criterion6},
        {"theory fixtures", criterion7},          {"statistics", criterion8},
        {"determinism", criterion9},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
