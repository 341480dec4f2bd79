#ifndef JINV_THEORY_HPP
#define JINV_THEORY_HPP

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "jinv/grid.hpp"
#include "jinv/rng.hpp"

namespace jinv {

/**
 * Stationary Gaussian process on a side x side toroidal grid with unit
 * marginal variance and squared-exponential correlation in wrapped grid
 * distance. Measurements add white Gaussian noise of deviation noise_sigma.
 */
struct TorusGP {
    int side = 33;
    double lengthscale = 1.0;
    double noise_sigma = 0.5;
};

/**
 * The side^2 x side^2 covariance matrix. Each axis uses the periodized
 * squared-exponential sum_w exp(-(d + w*side)^2 / (2 l^2)), normalized to a
 * unit diagonal; the product over axes is positive definite on the torus,
 * which the bare minimum-image kernel is not once l approaches side/2.
 * For small l it coincides with exp(-dist^2 / (2 l^2)) to machine precision.
 */
RealMatrix gp_kernel(const TorusGP& gp);

/// Draw (y, x): y ~ N(0, K) by Cholesky (escalating jitter 1e-12..1e-6),
/// x = y + noise. Deterministic given the seed.
std::pair<ImageGrid, ImageGrid> gp_sample(const TorusGP& gp, Seed seed);

/// Per-pixel MSE of the unrestricted optimum E[y|x]:
/// trace(K - K (K + s^2 I)^{-1} K) / m. Requires noise_sigma > 0.
double gp_full_predictor_mse(const TorusGP& gp);

/// Per-pixel MSE of the optimal singleton-partition J-invariant predictor
/// E[y_j | x_{-j}]: Var = K_jj - k_j^T (K_{-j,-j} + s^2 I)^{-1} k_j. Computed
/// at one representative pixel and cross-checked at five random pixels
/// (torus symmetry makes all pixels equivalent). Requires noise_sigma > 0.
double gp_jinv_predictor_mse(const TorusGP& gp);

/// Finite collection of templates in R^m with i.i.d. Gaussian measurement
/// noise. letters has one template per row.
struct Alphabet {
    RealMatrix letters;
    double noise_sigma = 1.0;
};

/**
 * Posterior-weighted average of the letters, with weights computed from the
 * coordinates outside J only: w_i = exp(-||(a_i - x)*1_{J^c}||^2 / (2 s^2)),
 * stabilized by log-sum-exp. The caller keeps the J coordinates of the
 * result for the J-invariant prediction.
 */
std::vector<double> alphabet_denoise(std::span<const double> x, const Alphabet& alphabet,
                                     std::span<const std::uint32_t> j_subset);

struct AlphabetCurvePoint {
    double sigma = 0.0;
    double alphabet_mse = 0.0;
    double gp_mse = 0.0;
    double alphabet_se = 0.0; // Monte-Carlo standard error of alphabet_mse
};

/**
 * For each sigma: Monte-Carlo MSE of the singleton J-invariant alphabet
 * denoiser (letters drawn uniformly, Gaussian noise), against the analytic
 * MSE of the optimal J-invariant predictor for Gaussian data with the
 * letters' covariance.
 */
std::vector<AlphabetCurvePoint> alphabet_vs_gp_mse(const Alphabet& alphabet,
                                                   std::span<const double> sigmas, Seed seed,
                                                   int trials);

/// Joint covariance in blocks; sigma_xy is the upper-right block.
struct CovariancePair {
    RealMatrix sigma_xx;
    RealMatrix sigma_yy;
    RealMatrix sigma_xy;
};

/// True iff sigma_xx - sigma_xy sigma_yy^{-1} sigma_xy^T is PSD up to
/// tolerance 1e-9 * ||joint||. Throws on non-symmetric input.
bool check_psd_block_lemma(const CovariancePair& cov);

/// Procedural glyph fixture: count binary side x side letters built from
/// random coarse x coarse block patterns, pairwise distinct.
RealMatrix make_glyph_alphabet(Seed seed, int count = 30, int side = 16, int coarse = 4);

struct GpCurvePoint {
    double lengthscale = 0.0;
    double jinv_mse = 0.0;
    double full_mse = 0.0;
};

/// CSV "lengthscale,jinv_mse,full_mse".
void write_gp_curve_csv(std::ostream& out, std::span<const GpCurvePoint> curve);
std::vector<GpCurvePoint> read_gp_curve_csv(std::istream& in);

/// CSV "sigma,alphabet_mse,gp_mse".
void write_alphabet_curve_csv(std::ostream& out, std::span<const AlphabetCurvePoint> curve);
std::vector<AlphabetCurvePoint> read_alphabet_curve_csv(std::istream& in);

} // namespace jinv

#endif
