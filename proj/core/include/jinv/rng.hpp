#ifndef JINV_RNG_HPP
#define JINV_RNG_HPP

#include <cmath>
#include <cstdint>

namespace jinv {

/// 64-bit seed wrapper for deterministic simulation.
struct Seed {
    std::uint64_t value = 0;
};

namespace detail {
inline std::uint64_t splitmix_step(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

/**
 * Counter-based random stream keyed on (seed, stream, counter).
 *
 * Every consumer derives its own generator from the triple, so results do
 * not depend on evaluation order or thread count: pixel j of stage s always
 * sees the stream (seed, s, j) regardless of which worker computes it.
 */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        state_ = seed;
        (void)detail::splitmix_step(state_);
        state_ ^= stream * 0xD6E8FEB86659FD93ULL;
        (void)detail::splitmix_step(state_);
        state_ ^= counter * 0xA3B195354A39B70DULL;
        (void)detail::splitmix_step(state_);
    }

    std::uint64_t next_u64() { return detail::splitmix_step(state_); }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    /// Uniform double in (0, 1] (safe for logarithms).
    double next_unit_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    /// Uniform integer in [0, bound). bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection to stay unbiased
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % bound;
    }

    /// Standard normal via Box-Muller; the second value is cached.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Standard Cauchy.
    double next_cauchy() {
        return std::tan(3.14159265358979323846 * (next_unit_open() - 0.5));
    }

private:
    std::uint64_t state_ = 0;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Poisson draw. Inversion for small means, Hormann's transformed rejection
/// (PTRS) for the midrange, rounded normal approximation for mean > 1000.
std::int64_t sample_poisson(CounterRng& rng, double mean);

/// Binomial draw. Exact for n <= 2^20 (Bernoulli sums; popcount fast path at
/// p = 1/2); rounded, clamped normal approximation for larger n.
std::int64_t sample_binomial(CounterRng& rng, std::int64_t n, double p);

} // namespace jinv

#endif
