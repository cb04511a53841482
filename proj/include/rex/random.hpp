#pragma once

#include "rex/errors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace rex {

namespace detail {

/// SplitMix64 output function: bijective 64-bit mix with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

} // namespace detail

/// Derive a 64-bit sub-seed from a base seed and a text label. Pure function:
/// the same (seed, label) always yields the same value, and distinct labels
/// decorrelate the result.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    const std::uint64_t a = detail::mix64(seed + detail::kGolden);
    const std::uint64_t b = detail::mix64(detail::fnv1a(label) + detail::kGolden);
    return detail::mix64(a ^ (b + detail::kGolden + (a << 6) + (a >> 2)));
}

/// Counter-based random stream (SplitMix64). The state is a counter advanced
/// by a fixed increment; each output is a hash of the counter, so streams
/// derived from distinct (seed, label) pairs are independent and replay is
/// bit-exact. Value type: copy freely, never shared between searches.
class RandomStream {
public:
    RandomStream() : state_(detail::kGolden) {}
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    static RandomStream derive(std::uint64_t seed, std::string_view label) {
        return RandomStream(derive_seed(seed, label));
    }

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double strictly inside (0, 1); safe to pass to log().
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal draw (Box-Muller, pairs cached).
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_open01();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Gamma(shape, scale=1) via Marsaglia-Tsang squeeze/rejection for shape >= 1,
/// boosted through Gamma(a) = Gamma(a+1) * U^(1/a) for shape < 1.
inline double gamma_sample(double shape, RandomStream& rng) {
    if (!(shape > 0.0)) {
        throw DomainError("gamma_sample: shape must be > 0");
    }
    double boost = 1.0;
    if (shape < 1.0) {
        boost = std::pow(rng.next_open01(), 1.0 / shape);
        shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_open01();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v;
    }
}

/// Beta(alpha, beta) as X/(X+Y) with independent Gamma draws. The result is
/// clamped into the open interval so callers can rely on output in (0, 1)
/// even when one gamma draw underflows.
inline double beta_sample(double alpha, double beta, RandomStream& rng) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw DomainError("beta_sample: alpha and beta must be > 0");
    }
    const double x = gamma_sample(alpha, rng);
    const double y = gamma_sample(beta, rng);
    const double t = x / (x + y);
    if (!(t > 0.0)) return std::numeric_limits<double>::min();
    if (!(t < 1.0)) return std::nextafter(1.0, 0.0);
    return t;
}

} // namespace rex
