#include "cliffpoint/theory.hpp"

#include "cliffpoint/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace cliffpoint {

double rope_period(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw Error(ErrorKind::invalid_config, "RoPE theta must be positive");
    return 2.0 * std::numbers::pi / theta;
}

double rope_threshold(const RopeParams& params) {
    if (params.t_max <= 0) throw Error(ErrorKind::invalid_config, "t_max must be positive");
    if (!(params.alpha >= 0.0 && params.alpha <= 1.5)) throw Error(ErrorKind::invalid_config, "alpha must be in [0, 1.5]");
    const double ratio = params.alpha * rope_period(params.theta) / static_cast<double>(params.t_max);
    return std::clamp(ratio, 0.0, 1.0);
}

std::string_view to_string(Bottleneck b) {
    switch (b) {
        case Bottleneck::rope: return "rope";
        case Bottleneck::attention: return "attention";
        case Bottleneck::info: return "info";
    }
    return "rope";
}

UnifiedThreshold unified_threshold(std::optional<double> l_rope, std::optional<double> l_attention,
                                   std::optional<double> l_info) {
    std::optional<UnifiedThreshold> best;
    auto consider = [&](std::optional<double> v, Bottleneck b) {
        if (v && (!best || *v < best->ratio)) best = UnifiedThreshold{*v, b};
    };
    consider(l_rope, Bottleneck::rope);
    consider(l_attention, Bottleneck::attention);
    consider(l_info, Bottleneck::info);
    if (!best) throw Error(ErrorKind::invalid_input, "unified threshold needs at least one bound");
    return *best;
}

AttentionMatrix::AttentionMatrix(std::size_t length, std::vector<double> weights)
    : length_(length), weights_(std::move(weights)) {
    if (length_ == 0) throw Error(ErrorKind::invalid_matrix, "attention matrix is empty");
    if (weights_.size() != length_ * length_) throw Error(ErrorKind::invalid_matrix, "attention matrix is not square");
    for (std::size_t i = 0; i < length_; ++i) {
        double sum = 0.0;
        for (double a : row(i)) {
            if (!(a >= 0.0) || !std::isfinite(a)) {
                throw Error(ErrorKind::invalid_matrix, "row " + std::to_string(i) + " has a negative or non-finite weight");
            }
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw Error(ErrorKind::invalid_matrix, "row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

AttentionMatrix AttentionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != rows.size()) throw Error(ErrorKind::invalid_matrix, "attention matrix is not square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return AttentionMatrix(rows.size(), std::move(flat));
}

AttentionMatrix AttentionMatrix::read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto end = line.find(',', pos);
            if (end == std::string::npos) end = line.size();
            auto cell = std::string_view(line).substr(pos, end - pos);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
                throw Error(ErrorKind::parse_error, "attention CSV line " + std::to_string(line_no) + ": bad number '" +
                                                        std::string(cell) + "'");
            }
            row.push_back(v);
            pos = end + 1;
        }
        rows.push_back(std::move(row));
    }
    return from_rows(rows);
}

double attention_concentration(const AttentionMatrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.length(); ++i) {
        const auto r = m.row(i);
        sum += *std::max_element(r.begin(), r.end());
    }
    return sum / static_cast<double>(m.length());
}

double attention_entropy(const AttentionMatrix& m) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.length(); ++i) {
        for (double a : m.row(i)) {
            if (a > 0.0) h -= a * std::log(a);
        }
    }
    return h / static_cast<double>(m.length());
}

}  // namespace cliffpoint
