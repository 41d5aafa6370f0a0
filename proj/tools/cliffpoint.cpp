// cliffpoint: critical-threshold detection for context-length degradation data.

#include "cliffpoint/error.hpp"
#include "cliffpoint/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

using namespace cliffpoint;

namespace {

struct CommonOptions {
    std::string input;
    std::string format = "csv";
    std::string output;
    std::string emit = "json";
    std::string config;
    std::uint64_t seed = default_permutation_seed;
    int permutations = default_permutations;
    std::map<std::string, std::string> overrides;  // config key -> raw value
};

std::string flag_name(const std::string& key) {
    std::string out = "--";
    for (char c : key) out.push_back(c == '_' ? '-' : c);
    return out;
}

void add_io_options(CLI::App* cmd, CommonOptions& o, bool needs_input) {
    auto* in = cmd->add_option("--input", o.input, "Record file (CSV with header, or JSONL)");
    if (needs_input) in->required();
    cmd->add_option("--format", o.format, "Record format")->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--output", o.output, "Write output here instead of stdout");
    cmd->add_option("--emit", o.emit, "Output kind")->check(CLI::IsMember({"json", "md"}));
}

void add_config_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "key=value configuration file");
    cmd->add_option("--seed", o.seed, "Seed for permutation tests");
    cmd->add_option("--permutations", o.permutations, "Permutations per significance test")
        ->check(CLI::PositiveNumber);
    for (const auto& key : config_keys()) {
        // --t-max is registered here too, as one of the config fields.
        cmd->add_option_function<std::string>(
            flag_name(key), [&o, key](const std::string& v) { o.overrides[key] = v; },
            "Override " + key);
    }
}

DegradationConfig load_config(const CommonOptions& o) {
    DegradationConfig cfg;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw Error(ErrorKind::io_error, "cannot open config " + o.config);
        cfg = parse_config(in);
    }
    for (const auto& [key, value] : o.overrides) apply_config_value(cfg, key, value);
    cfg.validate();
    return cfg;
}

class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error(ErrorKind::io_error, "cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
    out << content;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid_config, "bad grid value '" + item + "'");
        }
    }
    return grid;
}

struct TheoryOptions {
    std::optional<double> theta;
    double alpha = 1.0;
    std::optional<double> l_attention;
    std::optional<double> l_info;
    std::string attention_csv;
};

void add_theory_options(CLI::App* cmd, TheoryOptions& t) {
    cmd->add_option("--theta", t.theta, "RoPE base frequency (e.g. 1e-4)");
    cmd->add_option("--alpha", t.alpha, "Fraction of the RoPE period usable before aliasing");
    cmd->add_option("--l-attention", t.l_attention, "Externally estimated attention bound (ratio)");
    cmd->add_option("--l-info", t.l_info, "Externally estimated information bound (ratio)");
    cmd->add_option("--attention", t.attention_csv, "Dense CSV attention matrix (L rows of L weights)");
}

TheoryInputs theory_inputs(const TheoryOptions& t, std::int64_t t_max) {
    TheoryInputs in;
    if (t.theta) in.rope = RopeParams{*t.theta, t.alpha, t_max};
    in.l_attention = t.l_attention;
    in.l_info = t.l_info;
    if (!t.attention_csv.empty()) {
        std::ifstream f(t.attention_csv);
        if (!f) throw Error(ErrorKind::io_error, "cannot open " + t.attention_csv);
        in.attention = AttentionMatrix::read_csv(f);
    }
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect cliff-like critical thresholds in (context ratio, performance) data"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    // score
    CommonOptions score_opts;
    auto* score = app.add_subcommand("score", "Dual-level F1 for each prediction/reference record");
    add_io_options(score, score_opts, true);

    // detect
    CommonOptions detect_opts;
    std::string plot_prefix;
    auto* detect = app.add_subcommand("detect", "Run the five detection methods and cross-validate");
    add_io_options(detect, detect_opts, true);
    add_config_options(detect, detect_opts);
    detect->add_option("--plot-prefix", plot_prefix,
                       "Also write PREFIX_points.csv and PREFIX_trend.csv for plotting");

    // regions
    CommonOptions region_opts;
    auto* regions = app.add_subcommand("regions", "Per-region statistics, significance and correlation");
    add_io_options(regions, region_opts, true);
    add_config_options(regions, region_opts);

    // synth
    SynthConfig synth_cfg;
    std::string synth_output, synth_truth, synth_format = "csv", synth_dist = "uniform";
    bool synth_flat = false;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic degradation curve with known cliff");
    synth->add_option("--output", synth_output, "Record file to write (stdout if omitted)");
    synth->add_option("--truth", synth_truth, "Write the ground-truth JSON here");
    synth->add_option("--format", synth_format, "Record format")->check(CLI::IsMember({"csv", "jsonl"}));
    synth->add_option("--n", synth_cfg.n_points, "Number of points");
    synth->add_option("--cliff", synth_cfg.cliff_ratio, "Cliff ratio");
    synth->add_flag("--flat", synth_flat, "Generate a flat series with no cliff");
    synth->add_option("--p-high", synth_cfg.p_high, "Performance before the cliff");
    synth->add_option("--p-low", synth_cfg.p_low, "Performance after the cliff");
    synth->add_option("--width", synth_cfg.transition_width, "Transition width (ratio)");
    synth->add_option("--sigma", synth_cfg.noise_sigma, "Gaussian noise standard deviation");
    synth->add_option("--distribution", synth_dist, "Ratio distribution")
        ->check(CLI::IsMember({"uniform", "bimodal"}));
    synth->add_option("--seed", synth_cfg.seed, "Generator seed");

    // sensitivity
    CommonOptions sens_opts;
    std::string sens_param, sens_grid;
    auto* sensitivity = app.add_subcommand("sensitivity", "Re-run detection across a parameter grid");
    add_io_options(sensitivity, sens_opts, true);
    add_config_options(sensitivity, sens_opts);
    sensitivity->add_option("--parameter", sens_param, "peak_window | rise_range_width | rebound_threshold")
        ->required();
    sensitivity->add_option("--grid", sens_grid, "Comma-separated values, e.g. 3,4,5,6,7")->required();

    // predict-rope
    RopeParams rope;
    std::string rope_emit = "json", rope_output;
    auto* predict = app.add_subcommand("predict-rope", "RoPE period and predicted threshold ratio");
    predict->add_option("--theta", rope.theta, "RoPE base frequency")->required();
    predict->add_option("--alpha", rope.alpha, "Fraction of the period usable before aliasing");
    predict->add_option("--t-max", rope.t_max, "Maximum context length in tokens");
    predict->add_option("--emit", rope_emit, "Output kind")->check(CLI::IsMember({"json", "md"}));
    predict->add_option("--output", rope_output, "Write output here instead of stdout");

    // report
    CommonOptions report_opts;
    TheoryOptions theory_opts;
    auto* report = app.add_subcommand("report", "Detection, regions and theory in one document");
    add_io_options(report, report_opts, true);
    add_config_options(report, report_opts);
    add_theory_options(report, theory_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) {
            std::istringstream in(read_file(score_opts.input));
            const auto records = parse_records(in, parse_record_format(score_opts.format));
            Json rows = Json::array();
            for (const auto& [rec, line] : records) {
                if (!rec.prediction || !rec.reference) {
                    throw Error(ErrorKind::invalid_input,
                                "line " + std::to_string(line) + ": record lacks prediction/reference");
                }
                Json row;
                row["id"] = rec.id;
                row["line"] = line;
                try {
                    row.update(to_json(dual_f1(*rec.prediction, *rec.reference)));
                } catch (const Error& e) {
                    throw Error(ErrorKind::invalid_input, "line " + std::to_string(line) + ": " + e.what());
                }
                rows.push_back(std::move(row));
            }
            Sink sink(score_opts.output);
            if (parse_emit(score_opts.emit) == Emit::json) {
                sink.stream() << dump(rows);
            } else {
                sink.stream() << "| id | F1 | matched by | token P | token R |\n|---|---|---|---|---|\n";
                for (const auto& r : rows) {
                    sink.stream() << "| " << r["id"].get<std::string>() << " | " << fixed4(r["f1"].get<double>())
                                  << " | " << r["matched_by"].get<std::string>() << " | "
                                  << fixed4(r["token_precision"].get<double>()) << " | "
                                  << fixed4(r["token_recall"].get<double>()) << " |\n";
                }
            }
        } else if (detect->parsed() || report->parsed()) {
            auto& o = detect->parsed() ? detect_opts : report_opts;
            const auto cfg = load_config(o);
            const auto input = ingest_records(o.input, parse_record_format(o.format), cfg);
            auto run = run_detect(input, cfg, RunOptions{o.permutations, o.seed});
            if (report->parsed()) run.theory = predict_theory(theory_inputs(theory_opts, cfg.t_max));
            for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";

            Sink sink(o.output);
            if (parse_emit(o.emit) == Emit::json) {
                sink.stream() << dump(to_json(run));
            } else {
                render_markdown(sink.stream(), run);
            }
            if (!plot_prefix.empty()) {
                std::ostringstream points, trend;
                write_plot_points(points, input.series);
                write_plot_trend(trend, input.series, cfg);
                write_file(plot_prefix + "_points.csv", points.str());
                write_file(plot_prefix + "_trend.csv", trend.str());
            }
        } else if (regions->parsed()) {
            const auto cfg = load_config(region_opts);
            const auto input = ingest_records(region_opts.input, parse_record_format(region_opts.format), cfg);
            require_nonempty(input.series);
            const auto rr = build_region_report(input.series, cfg, region_opts.permutations, region_opts.seed);
            Sink sink(region_opts.output);
            if (parse_emit(region_opts.emit) == Emit::json) {
                sink.stream() << dump(to_json(rr));
            } else {
                render_markdown(sink.stream(), rr);
            }
        } else if (synth->parsed()) {
            if (synth_flat) synth_cfg.cliff_ratio.reset();
            if (synth_dist == "bimodal") synth_cfg.ratio_distribution = BimodalRatios{};
            const auto generated = generate_series(synth_cfg);
            Sink sink(synth_output);
            write_series_records(sink.stream(), generated.series, parse_record_format(synth_format));
            if (!synth_truth.empty()) write_file(synth_truth, dump(to_json(generated.truth)));
        } else if (sensitivity->parsed()) {
            const auto cfg = load_config(sens_opts);
            const auto input = ingest_records(sens_opts.input, parse_record_format(sens_opts.format), cfg);
            const auto grid = parse_grid(sens_grid);
            const auto sr = sensitivity_sweep(input.series, cfg, parse_sweep_parameter(sens_param), grid);
            Sink sink(sens_opts.output);
            if (parse_emit(sens_opts.emit) == Emit::json) {
                sink.stream() << dump(to_json(sr));
            } else {
                render_markdown(sink.stream(), sr);
            }
        } else if (predict->parsed()) {
            TheoryInputs in;
            in.rope = rope;
            const auto t = predict_theory(in);
            Sink sink(rope_output);
            if (parse_emit(rope_emit) == Emit::json) {
                sink.stream() << dump(to_json(t));
            } else {
                render_markdown(sink.stream(), t);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
