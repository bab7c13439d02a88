#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace beergame {

/// SplitMix64 (Steele, Lea, Flood 2014). Portable, 64-bit state, and the
/// finalizer doubles as a strong integer mixer for seed derivation.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t operator()() {
        state_ += kGamma;
        return mix(state_);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    /// Unbiased integer in [0, bound) by rejection on the top of the range.
    constexpr std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = max() - max() % bound;
        for (;;) {
            const std::uint64_t x = (*this)();
            if (x < limit) return x % bound;
        }
    }

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit; used to turn names into seed material and to fingerprint prompts.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline constexpr int kDemandMin = 0;
inline constexpr int kDemandMax = 8;

/// Retail demand for one period.
///
/// Derivation: a SplitMix64 stream is started at state
/// `mix(seed) ^ (period * 0x9E3779B97F4A7C15)` and the first draw that is not
/// rejected is reduced modulo the support size (9 for the default [0, 8]).
/// The value depends only on (seed, period), so any period can be queried
/// independently.
constexpr int draw_demand(std::uint64_t seed, int period, int lo = kDemandMin, int hi = kDemandMax) {
    SplitMix64 stream(SplitMix64::mix(seed) ^ (static_cast<std::uint64_t>(period) * SplitMix64::kGamma));
    return lo + static_cast<int>(stream.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace beergame
