#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace echoaug {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

/// Counter-based random stream. The key is a hash of (seed, sample, stage);
/// draw n is mix64(key + n * golden). Two streams with the same key yield
/// the same sequence regardless of which thread or order created them.
///
/// All distributions are implemented here rather than via <random> so the
/// output is identical across standard library implementations.
class RngStream {
public:
    constexpr RngStream() noexcept = default;
    constexpr explicit RngStream(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

    constexpr std::uint64_t next_u64() noexcept {
        return detail::mix64(key_ + (++counter_) * detail::kGolden);
    }

    /// Uniform in [0,1) with 53 bits of resolution.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo,hi]; returns lo exactly when lo == hi.
    constexpr double uniform(double lo, double hi) noexcept {
        if (lo == hi) return lo;
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in the closed range [lo,hi] (rejection sampling, unbiased).
    constexpr std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Standard normal via Box-Muller (one value per call, two uniforms consumed).
    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0,1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Independent stream for (seed, sample_index, stage_index).
constexpr RngStream derive_stream(std::uint64_t seed, std::uint64_t sample_index,
                                  std::uint64_t stage_index) noexcept {
    std::uint64_t k = detail::mix64(seed ^ 0x243F6A8885A308D3ULL);
    k = detail::mix64(k ^ detail::mix64(sample_index + 0x13198A2E03707344ULL));
    k = detail::mix64(k ^ detail::mix64(stage_index + 0xA4093822299F31D0ULL));
    return RngStream(k);
}

}  // namespace echoaug
