#pragma once

// Record files (CSV / JSONL) and the flat key=value configuration format.

#include "cliffpoint/scoring.hpp"
#include "cliffpoint/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cliffpoint {

enum class RecordFormat { csv, jsonl };

RecordFormat parse_record_format(std::string_view name);
std::string_view to_string(RecordFormat format);

/// A record plus the 1-based line it came from.
struct ParsedRecord {
    SampleRecord record;
    std::size_t line = 0;
};

/// CSV needs a header naming any of: id, token_count, ratio, performance,
/// prediction, reference. Empty cells are absent values. Throws
/// Error(parse_error) with the offending line on malformed input.
std::vector<ParsedRecord> parse_records(std::istream& in, RecordFormat format);

enum class RatioSource { given, token_count };
enum class PerformanceSource { given, scored };

struct RecordResolution {
    std::string id;
    std::size_t line = 0;
    double ratio = 0.0;
    double performance = 0.0;
    RatioSource ratio_source = RatioSource::given;
    PerformanceSource performance_source = PerformanceSource::given;
    std::optional<MatchKind> matched_by;
};

struct IngestResult {
    PerformanceSeries series;  // preprocessed
    std::vector<RecordResolution> resolutions;
    std::vector<std::string> warnings;
    std::string digest;  // SHA-256 of the raw input bytes, hex
};

/// Resolves each record to (ratio, performance): ratio from token_count/t_max
/// when absent, performance from dual_f1 when absent. Throws
/// Error(invalid_input) naming the line of the first unresolvable record.
std::vector<RecordResolution> resolve_records(const std::vector<ParsedRecord>& records, const DegradationConfig& cfg,
                                              std::vector<std::string>* warnings = nullptr);

IngestResult ingest_text(std::string_view text, RecordFormat format, const DegradationConfig& cfg,
                         std::string provenance = "input");

IngestResult ingest_records(const std::filesystem::path& path, RecordFormat format, const DegradationConfig& cfg);

/// Writes (ratio, performance) points as records with ids "s0", "s1", ...
void write_series_records(std::ostream& out, const PerformanceSeries& series, RecordFormat format);

std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Applies one configuration entry by DegradationConfig field name. Ranges
/// and boundary lists are comma-separated. Throws Error(invalid_config).
void apply_config_value(DegradationConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value lines; '#' starts a comment. The result is validated.
DegradationConfig parse_config(std::istream& in, DegradationConfig base = {});

/// Field names accepted by apply_config_value, in declaration order.
const std::vector<std::string>& config_keys();

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace cliffpoint
