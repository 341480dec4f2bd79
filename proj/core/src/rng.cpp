#include "jinv/rng.hpp"

#include <bit>
#include <stdexcept>

namespace jinv {

namespace {

// Hormann's PTRS transformed-rejection sampler, valid for mean >= 10.
std::int64_t poisson_ptrs(CounterRng& rng, double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);

    for (;;) {
        const double u = rng.next_unit() - 0.5;
        const double v = rng.next_unit_open();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::int64_t>(kf);
        }
    }
}

std::int64_t poisson_inversion(CounterRng& rng, double mean) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double product = rng.next_unit_open();
    while (product > limit) {
        ++k;
        product *= rng.next_unit_open();
    }
    return k;
}

} // namespace

std::int64_t sample_poisson(CounterRng& rng, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("sample_poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(rng, mean);
    if (mean <= 1000.0) return poisson_ptrs(rng, mean);
    const double draw = std::round(mean + std::sqrt(mean) * rng.next_gaussian());
    return draw < 0.0 ? 0 : static_cast<std::int64_t>(draw);
}

std::int64_t sample_binomial(CounterRng& rng, std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("sample_binomial: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_binomial: p must be in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;

    constexpr std::int64_t kExactLimit = 1 << 20;
    if (n <= kExactLimit) {
        std::int64_t hits = 0;
        if (p == 0.5) {
            std::int64_t remaining = n;
            while (remaining >= 64) {
                hits += std::popcount(rng.next_u64());
                remaining -= 64;
            }
            if (remaining > 0) {
                const std::uint64_t mask = (remaining == 64) ? ~0ULL : ((1ULL << remaining) - 1);
                hits += std::popcount(rng.next_u64() & mask);
            }
        } else {
            for (std::int64_t i = 0; i < n; ++i) hits += (rng.next_unit() < p);
        }
        return hits;
    }

    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(mean * (1.0 - p));
    const double draw = std::round(mean + sd * rng.next_gaussian());
    if (draw < 0.0) return 0;
    if (draw > static_cast<double>(n)) return n;
    return static_cast<std::int64_t>(draw);
}

} // namespace jinv
