#pragma once

// Theoretical threshold predictors (RoPE period, unified minimum) and
// attention-focus metrics over externally supplied attention matrices.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cliffpoint {

struct RopeParams {
    double theta = 1.0e-4;
    double alpha = 1.0;
    std::int64_t t_max = 131072;
};

/// Approximate positional period 2*pi/theta, in tokens.
double rope_period(double theta);

/// alpha * period / t_max, clamped to [0, 1].
double rope_threshold(const RopeParams& params);

enum class Bottleneck { rope, attention, info };

std::string_view to_string(Bottleneck b);

struct UnifiedThreshold {
    double ratio = 0.0;
    Bottleneck bottleneck = Bottleneck::rope;
};

/// Minimum of the supplied bounds. Ties resolve in rope, attention, info order.
UnifiedThreshold unified_threshold(std::optional<double> l_rope, std::optional<double> l_attention,
                                   std::optional<double> l_info);

/// Square, row-stochastic attention weights (row-major).
class AttentionMatrix {
public:
    /// Throws Error(invalid_matrix) unless rows are nonnegative and sum to 1
    /// within 1e-9.
    AttentionMatrix(std::size_t length, std::vector<double> weights);

    static AttentionMatrix from_rows(const std::vector<std::vector<double>>& rows);

    /// Dense CSV: L lines of L comma-separated reals.
    static AttentionMatrix read_csv(std::istream& in);

    std::size_t length() const noexcept { return length_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(weights_).subspan(i * length_, length_);
    }

private:
    std::size_t length_;
    std::vector<double> weights_;
};

/// Mean over rows of the row maximum; in [1/L, 1].
double attention_concentration(const AttentionMatrix& m);

/// Mean row entropy in nats, with 0 log 0 = 0; in [0, ln L].
double attention_entropy(const AttentionMatrix& m);

}  // namespace cliffpoint
