#ifndef JINV_NOISE_HPP
#define JINV_NOISE_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jinv/grid.hpp"
#include "jinv/rng.hpp"

namespace jinv {

struct GaussianNoise {
    double sigma = 0.0; // additive white noise standard deviation
};

struct PoissonNoise {
    // Intensity y is scaled to mean photon count peak*y before sampling,
    // then the draw is rescaled back: x = Poisson(peak*y) / peak.
    double peak = 1.0;
};

struct BernoulliNoise {
    // A pixel is corrupted with probability p; a corrupted pixel becomes
    // dark (low) or hot (high), each with probability p/2.
    double p = 0.0;
    double low = 0.0;
    double high = 1.0;
};

struct CauchyNoise {
    double scale = 0.0; // additive heavy-tailed noise
};

struct GainFieldNoise {
    // Per-pixel multiplicative gain 1 + Normal(0, sigma), drawn once per image.
    double sigma = 0.0;
};

using NoiseTerm =
    std::variant<GaussianNoise, PoissonNoise, BernoulliNoise, CauchyNoise, GainFieldNoise>;

struct ClipRange {
    double lo = 0.0;
    double hi = 1.0;
};

/**
 * Ordered composition of noise terms with an optional final clip.
 * Terms apply in sequence, each reading the output of the previous one.
 */
struct NoiseSpec {
    std::vector<NoiseTerm> terms;
    std::optional<ClipRange> clip;

    /// Throws std::invalid_argument when any parameter is out of range.
    void validate() const;
};

/// Apply the composite noise model. Deterministic given (y, spec, seed);
/// each pixel of each term draws from its own counter-based stream.
ImageGrid apply_noise(const ImageGrid& y, const NoiseSpec& spec, Seed seed);

/// Analytic per-pixel mean noise variance E||x - y||^2 / m under the spec,
/// composed term by term assuming independence. Throws UnsupportedSpecError
/// when the spec contains a Cauchy term (undefined variance) or a clip.
double noise_variance(const NoiseSpec& spec, const ImageGrid& y);

/// True when E[x | y] == y under the spec: no Cauchy, no clip, and every
/// Bernoulli term has levels centered on the clean image.
bool is_conditionally_unbiased(const NoiseSpec& spec, const ImageGrid& y);

/// Text form: one term per line ("gaussian sigma=0.1", "poisson peak=30",
/// "bernoulli p=0.2 low=0 high=1", "cauchy scale=0.01", "gain sigma=0.3"),
/// optional "clip lo=0 hi=1". '#' starts a comment.
std::string format_noise_spec(const NoiseSpec& spec);
NoiseSpec parse_noise_spec(const std::string& text);

} // namespace jinv

#endif
