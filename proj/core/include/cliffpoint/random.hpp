#pragma once

// Portable seeded randomness. std::mt19937_64 output is fixed by the
// standard; everything derived from it here (uniforms, bounded integers,
// Gaussians, shuffles) is computed by hand so results do not depend on the
// standard library's distribution implementations.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace cliffpoint {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double strictly inside (0,1): top 53 bits plus half an ulp.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), by rejection of the biased tail.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= limit) return x % bound;
        }
    }

    /// Gaussian draw by inverse-transform sampling of uniform().
    double gaussian(double mu, double sigma);

    /// Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cliffpoint
