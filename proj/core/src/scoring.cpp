#include "cliffpoint/scoring.hpp"

#include "cliffpoint/error.hpp"

#include <algorithm>
#include <set>

namespace cliffpoint {

std::string_view to_string(MatchKind kind) {
    switch (kind) {
        case MatchKind::substring: return "substring";
        case MatchKind::token: return "token";
        case MatchKind::character: return "char";
        case MatchKind::none: return "none";
    }
    return "none";
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::set<std::string_view> token_set(std::string_view normalized) {
    std::set<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < normalized.size()) {
        auto end = normalized.find(' ', pos);
        if (end == std::string_view::npos) end = normalized.size();
        if (end > pos) tokens.insert(normalized.substr(pos, end - pos));
        pos = end + 1;
    }
    return tokens;
}

}  // namespace

std::string normalize_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

std::size_t code_point_count(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

F1Breakdown dual_f1(std::string_view prediction, std::string_view reference) {
    const std::string pred = normalize_text(prediction);
    const std::string ref = normalize_text(reference);
    if (ref.empty()) throw Error(ErrorKind::invalid_reference, "reference is empty after normalization");

    F1Breakdown out;
    if (pred.empty()) return out;

    if (pred.find(ref) != std::string::npos) {
        out.f1 = 1.0;
        out.matched_by = MatchKind::substring;
        return out;
    }

    const auto pred_tokens = token_set(pred);
    const auto ref_tokens = token_set(ref);
    std::size_t common = 0;
    for (const auto& t : ref_tokens) common += pred_tokens.count(t);

    if (common > 0) {
        const auto np = static_cast<double>(pred_tokens.size());
        const auto nr = static_cast<double>(ref_tokens.size());
        const auto nc = static_cast<double>(common);
        out.token_precision = nc / np;
        out.token_recall = nc / nr;
        // 2PR/(P+R) reduces to 2|common|/(|pred|+|ref|), which avoids rounding in P and R.
        out.token_f1 = 2.0 * nc / (np + nr);
        out.f1 = out.token_f1;
        out.matched_by = MatchKind::token;
        return out;
    }

    // Character-level fallback. The substring case already returned above, so
    // recall is always 0 here and this branch can only yield 0.
    out.char_recall = pred.find(ref) != std::string::npos ? 1.0 : 0.0;
    out.char_precision = std::min(1.0, static_cast<double>(code_point_count(ref)) /
                                           static_cast<double>(code_point_count(pred)));
    const double denom = out.char_precision + out.char_recall;
    out.char_f1 = denom > 0.0 ? 2.0 * out.char_precision * out.char_recall / denom : 0.0;
    out.f1 = std::max(out.token_f1, out.char_f1);
    out.matched_by = MatchKind::character;
    return out;
}

}  // namespace cliffpoint
