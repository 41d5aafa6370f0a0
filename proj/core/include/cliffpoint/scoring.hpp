#pragma once

#include <string>
#include <string_view>

namespace cliffpoint {

enum class MatchKind { substring, token, character, none };

std::string_view to_string(MatchKind kind);

/// Result of the dual-level (token + character) F1 comparison.
struct F1Breakdown {
    double f1 = 0.0;
    double token_precision = 0.0;
    double token_recall = 0.0;
    double token_f1 = 0.0;
    double char_precision = 0.0;
    double char_recall = 0.0;
    double char_f1 = 0.0;
    MatchKind matched_by = MatchKind::none;
};

/// Lowercases ASCII letters, trims and collapses whitespace runs to one space.
std::string normalize_text(std::string_view s);

/// Number of UTF-8 code points in s.
std::size_t code_point_count(std::string_view s);

/// Substring early return, then token-set F1, then the character-level
/// fallback when no token overlaps. Throws Error(invalid_reference) when the
/// reference normalizes to the empty string.
F1Breakdown dual_f1(std::string_view prediction, std::string_view reference);

}  // namespace cliffpoint
