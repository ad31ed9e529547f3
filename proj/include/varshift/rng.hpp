#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "varshift/errors.hpp"

namespace varshift::stats {

/// SplitMix64 finalizer; mixes a 64-bit word into an independent-looking one.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Reproducible stream of N(mean, variance) deviates.
///
/// The underlying generator is counter-based (SplitMix64), so identically
/// seeded streams are bitwise identical and substreams derived through
/// substream_key are independent regardless of generation order. One stream
/// is a single-consumer object; distinct streams can run concurrently.
class GaussianStream {
public:
    static constexpr std::string_view algorithm = "splitmix64-boxmuller";

    GaussianStream(std::uint64_t seed, double mean, double variance)
        : state_(seed), mean_(mean) {
        if (variance < 0.0) throw parameter_error("gaussian stream variance must be nonnegative");
        sigma_ = std::sqrt(variance);
    }

    /// Key for the index-th substream of a master seed.
    static constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index) noexcept {
        return mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ull));
    }

    double next() {
        if (sigma_ == 0.0) return mean_;
        if (has_cached_) {
            has_cached_ = false;
            return mean_ + sigma_ * cached_;
        }
        // Box-Muller on u1 in (0, 1], u2 in [0, 1).
        const double u1 = static_cast<double>((next_word() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_word() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return mean_ + sigma_ * radius * std::cos(angle);
    }

private:
    std::uint64_t next_word() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    std::uint64_t state_;
    double mean_;
    double sigma_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace varshift::stats
