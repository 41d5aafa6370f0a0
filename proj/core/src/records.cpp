#include "cliffpoint/records.hpp"

#include "cliffpoint/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cliffpoint {

namespace {

std::string at_line(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// One CSV record; quoted fields may span lines. Returns false at end of input.
bool read_csv_row(std::istream& in, std::vector<std::string>& cells, std::size_t& line) {
    cells.clear();
    std::string cell;
    bool quoted = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            ++line;
            cells.push_back(std::move(cell));
            return true;
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    if (quoted) throw Error(ErrorKind::parse_error, at_line(line, "unterminated quoted field"));
    if (!any) return false;
    cells.push_back(std::move(cell));
    ++line;
    return true;
}

const std::array<std::string_view, 6> record_columns{"id", "token_count", "ratio", "performance", "prediction",
                                                     "reference"};

void set_field(SampleRecord& rec, std::string_view column, const std::string& raw, std::size_t line) {
    if (column == "id") {
        rec.id = std::string(trim(raw));
        return;
    }
    if (column == "prediction") {
        if (!raw.empty()) rec.prediction = raw;
        return;
    }
    if (column == "reference") {
        if (!raw.empty()) rec.reference = raw;
        return;
    }
    if (trim(raw).empty()) return;
    if (column == "token_count") {
        rec.token_count = parse_number<std::int64_t>(raw);
        if (!rec.token_count) throw Error(ErrorKind::parse_error, at_line(line, "token_count is not an integer"));
    } else if (column == "ratio") {
        rec.ratio = parse_number<double>(raw);
        if (!rec.ratio) throw Error(ErrorKind::parse_error, at_line(line, "ratio is not a number"));
    } else if (column == "performance") {
        rec.performance = parse_number<double>(raw);
        if (!rec.performance) throw Error(ErrorKind::parse_error, at_line(line, "performance is not a number"));
    }
}

std::vector<ParsedRecord> parse_csv(std::istream& in) {
    std::vector<ParsedRecord> out;
    std::vector<std::string> cells;
    std::size_t line = 0;
    std::vector<std::string> header;
    while (read_csv_row(in, cells, line)) {
        const bool blank = cells.size() == 1 && trim(cells[0]).empty();
        if (blank) continue;
        if (header.empty()) {
            for (auto& h : cells) header.emplace_back(trim(h));
            const bool known = std::any_of(header.begin(), header.end(), [](const std::string& h) {
                return std::find(record_columns.begin(), record_columns.end(), h) != record_columns.end();
            });
            if (!known) throw Error(ErrorKind::parse_error, at_line(line, "missing CSV header"));
            continue;
        }
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::parse_error, at_line(line, "expected " + std::to_string(header.size()) +
                                                                  " cells, got " + std::to_string(cells.size())));
        }
        ParsedRecord pr;
        pr.line = line;
        for (std::size_t i = 0; i < header.size(); ++i) set_field(pr.record, header[i], cells[i], line);
        out.push_back(std::move(pr));
    }
    return out;
}

std::vector<ParsedRecord> parse_jsonl(std::istream& in) {
    std::vector<ParsedRecord> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::parse_error, at_line(line, e.what()));
        }
        if (!j.is_object()) throw Error(ErrorKind::parse_error, at_line(line, "record is not a JSON object"));

        ParsedRecord pr;
        pr.line = line;
        auto& rec = pr.record;
        try {
            if (j.contains("id") && !j["id"].is_null()) {
                rec.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
            }
            if (j.contains("token_count") && !j["token_count"].is_null()) {
                if (!j["token_count"].is_number_integer()) {
                    throw Error(ErrorKind::parse_error, at_line(line, "token_count is not an integer"));
                }
                rec.token_count = j["token_count"].get<std::int64_t>();
            }
            for (auto [key, field] : {std::pair{"ratio", &rec.ratio}, std::pair{"performance", &rec.performance}}) {
                if (j.contains(key) && !j[key].is_null()) {
                    if (!j[key].is_number()) throw Error(ErrorKind::parse_error, at_line(line, std::string(key) + " is not a number"));
                    *field = j[key].get<double>();
                }
            }
            for (auto [key, field] :
                 {std::pair{"prediction", &rec.prediction}, std::pair{"reference", &rec.reference}}) {
                if (j.contains(key) && !j[key].is_null()) {
                    if (!j[key].is_string()) throw Error(ErrorKind::parse_error, at_line(line, std::string(key) + " is not a string"));
                    *field = j[key].get<std::string>();
                }
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse_error, at_line(line, e.what()));
        }
        out.push_back(std::move(pr));
    }
    return out;
}

}  // namespace

RecordFormat parse_record_format(std::string_view name) {
    if (name == "csv") return RecordFormat::csv;
    if (name == "jsonl") return RecordFormat::jsonl;
    throw Error(ErrorKind::invalid_config, "unknown record format: " + std::string(name));
}

std::string_view to_string(RecordFormat format) { return format == RecordFormat::csv ? "csv" : "jsonl"; }

std::vector<ParsedRecord> parse_records(std::istream& in, RecordFormat format) {
    return format == RecordFormat::csv ? parse_csv(in) : parse_jsonl(in);
}

std::vector<RecordResolution> resolve_records(const std::vector<ParsedRecord>& records, const DegradationConfig& cfg,
                                              std::vector<std::string>* warnings) {
    std::vector<RecordResolution> out;
    out.reserve(records.size());
    for (const auto& [rec, line] : records) {
        RecordResolution res;
        res.id = rec.id.empty() ? "line" + std::to_string(line) : rec.id;
        res.line = line;

        if (rec.ratio) {
            res.ratio = *rec.ratio;
            if (rec.token_count && std::abs(compute_ratio(*rec.token_count, cfg.t_max) - *rec.ratio) > 1e-9) {
                throw Error(ErrorKind::invalid_input, at_line(line, "ratio disagrees with token_count / t_max"));
            }
        } else if (rec.token_count) {
            if (*rec.token_count < 0) throw Error(ErrorKind::invalid_input, at_line(line, "token_count is negative"));
            res.ratio = compute_ratio(*rec.token_count, cfg.t_max);
            res.ratio_source = RatioSource::token_count;
        } else {
            throw Error(ErrorKind::invalid_input, at_line(line, "record has neither ratio nor token_count"));
        }
        if (!(res.ratio >= 0.0) || !std::isfinite(res.ratio)) {
            throw Error(ErrorKind::invalid_input, at_line(line, "ratio must be a nonnegative number"));
        }
        if (res.ratio > 1.0 && warnings) {
            warnings->push_back(at_line(line, "ratio " + format_double(res.ratio) + " exceeds 1"));
        }

        if (rec.performance) {
            res.performance = *rec.performance;
            if (!(res.performance >= 0.0 && res.performance <= 1.0)) {
                throw Error(ErrorKind::invalid_input, at_line(line, "performance outside [0,1]"));
            }
        } else if (rec.prediction && rec.reference) {
            try {
                const auto f1 = dual_f1(*rec.prediction, *rec.reference);
                res.performance = f1.f1;
                res.matched_by = f1.matched_by;
            } catch (const Error& e) {
                throw Error(ErrorKind::invalid_input, at_line(line, e.what()));
            }
            res.performance_source = PerformanceSource::scored;
        } else {
            throw Error(ErrorKind::invalid_input, at_line(line, "record has neither performance nor prediction/reference"));
        }
        out.push_back(std::move(res));
    }
    return out;
}

IngestResult ingest_text(std::string_view text, RecordFormat format, const DegradationConfig& cfg,
                         std::string provenance) {
    cfg.validate();
    std::istringstream in{std::string(text)};
    const auto parsed = parse_records(in, format);

    IngestResult result;
    result.digest = sha256_hex(text);
    result.resolutions = resolve_records(parsed, cfg, &result.warnings);

    PerformanceSeries raw;
    raw.provenance = std::move(provenance);
    raw.points.reserve(result.resolutions.size());
    for (const auto& r : result.resolutions) raw.points.push_back({r.ratio, r.performance});
    result.series = preprocess(raw);
    return result;
}

IngestResult ingest_records(const std::filesystem::path& path, RecordFormat format, const DegradationConfig& cfg) {
    return ingest_text(read_file(path), format, cfg, path.filename().string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void write_series_records(std::ostream& out, const PerformanceSeries& series, RecordFormat format) {
    if (format == RecordFormat::csv) {
        out << "id,token_count,ratio,performance,prediction,reference\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << 's' << i << ",," << format_double(series.points[i].ratio) << ','
                << format_double(series.points[i].performance) << ",,\n";
        }
        return;
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        nlohmann::ordered_json j;
        j["id"] = "s" + std::to_string(i);
        j["ratio"] = series.points[i].ratio;
        j["performance"] = series.points[i].performance;
        out << j.dump() << '\n';
    }
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::io_error, "SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

namespace {

std::vector<double> parse_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        auto end = value.find(',', pos);
        if (end == std::string_view::npos) end = value.size();
        const auto v = parse_number<double>(value.substr(pos, end - pos));
        if (!v) throw Error(ErrorKind::invalid_config, std::string(key) + ": bad number list '" + std::string(value) + "'");
        out.push_back(*v);
        pos = end + 1;
    }
    return out;
}

Range parse_range(std::string_view key, std::string_view value) {
    const auto v = parse_list(key, value);
    if (v.size() != 2) throw Error(ErrorKind::invalid_config, std::string(key) + " needs two comma-separated bounds");
    return {v[0], v[1]};
}

template <typename T>
T parse_scalar(std::string_view key, std::string_view value) {
    const auto v = parse_number<T>(value);
    if (!v) throw Error(ErrorKind::invalid_config, std::string(key) + ": bad value '" + std::string(value) + "'");
    return *v;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "t_max",         "peak_window",    "min_peak_height", "peak_range",         "rise_range_width",
        "rebound_threshold", "post_min",   "post_max",        "drop_window",        "consecutive_rise_run",
        "n_bins",        "bin_search_range", "bin_drop_min",  "percentile_cut",     "ma_window",
        "cliff_theta",   "region_boundaries", "trend_window"};
    return keys;
}

void apply_config_value(DegradationConfig& cfg, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "t_max") cfg.t_max = parse_scalar<std::int64_t>(key, value);
    else if (key == "peak_window") cfg.peak_window = parse_scalar<int>(key, value);
    else if (key == "min_peak_height") cfg.min_peak_height = parse_scalar<double>(key, value);
    else if (key == "peak_range") cfg.peak_range = parse_range(key, value);
    else if (key == "rise_range_width") cfg.rise_range_width = parse_scalar<double>(key, value);
    else if (key == "rebound_threshold") cfg.rebound_threshold = parse_scalar<double>(key, value);
    else if (key == "post_min") cfg.post_min = parse_scalar<int>(key, value);
    else if (key == "post_max") cfg.post_max = parse_scalar<int>(key, value);
    else if (key == "drop_window") cfg.drop_window = parse_scalar<int>(key, value);
    else if (key == "consecutive_rise_run") cfg.consecutive_rise_run = parse_scalar<int>(key, value);
    else if (key == "n_bins") cfg.n_bins = parse_scalar<int>(key, value);
    else if (key == "bin_search_range") cfg.bin_search_range = parse_range(key, value);
    else if (key == "bin_drop_min") cfg.bin_drop_min = parse_scalar<double>(key, value);
    else if (key == "percentile_cut") cfg.percentile_cut = parse_scalar<double>(key, value);
    else if (key == "ma_window") cfg.ma_window = parse_scalar<int>(key, value);
    else if (key == "cliff_theta") cfg.cliff_theta = parse_scalar<double>(key, value);
    else if (key == "region_boundaries") cfg.region_boundaries = parse_list(key, value);
    else if (key == "trend_window") cfg.trend_window = parse_scalar<int>(key, value);
    else throw Error(ErrorKind::invalid_config, "unknown config key: " + std::string(key));
}

DegradationConfig parse_config(std::istream& in, DegradationConfig base) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::invalid_config, "config line " + std::to_string(line_no) + ": expected key=value");
        }
        try {
            apply_config_value(base, trim(view.substr(0, eq)), view.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorKind::invalid_config, "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    base.validate();
    return base;
}

}  // namespace cliffpoint
