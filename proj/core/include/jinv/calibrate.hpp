#ifndef JINV_CALIBRATE_HPP
#define JINV_CALIBRATE_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jinv/masking.hpp"
#include "jinv/noise.hpp"

namespace jinv {

/// Mean over pixels of (a_j - b_j)^2.
double mse(const ImageGrid& a, const ImageGrid& b);

/// 10*log10(1/mse) for unit-range images; +infinity when the MSE is zero.
double psnr(const ImageGrid& a, const ImageGrid& ref);

struct RescaleResult {
    ImageGrid image;
    bool degenerate = false; // input had zero variance; output is constant ref mean
};

/// Affine map a*out + b whose result matches the mean and variance of ref.
RescaleResult rescale_to_moments(const ImageGrid& out, const ImageGrid& ref);

/// E||f(x) - x||^2 per pixel, the loss computable without clean targets.
double self_supervised_loss(const JInvariantDenoiser& f, const ImageGrid& x);

struct DecompositionReport {
    double self_supervised = 0.0;       // mean_i ||f(x_i) - x_i||^2
    double supervised_plus_noise = 0.0; // mean_i (||f(x_i) - y||^2 + ||x_i - y||^2)
    double gap = 0.0;                   // |difference of the two means|
    double std_error = 0.0;             // SE of the per-seed differences
    int seeds = 0;
};

/**
 * Empirical check that the self-supervised loss splits into supervised loss
 * plus noise variance. Requires a conditionally unbiased spec (no Cauchy, no
 * clip, Bernoulli levels centered on the clean image); throws
 * UnsupportedSpecError otherwise.
 */
DecompositionReport check_loss_decomposition(const JInvariantDenoiser& f, const ImageGrid& y,
                                             const NoiseSpec& spec,
                                             std::span<const std::uint64_t> seeds);

struct CurveEntry {
    DenoiserParam param;
    double ss_loss = 0.0;
    std::optional<double> gt_loss;
    std::optional<double> psnr_db;
};

struct CalibrationCurve {
    std::vector<CurveEntry> entries;
};

/**
 * Evaluate the masked (J-invariant) version of each parameter on x.
 * Ground-truth loss and PSNR are filled iff clean is non-null. Entry order
 * follows the parameter order.
 */
CalibrationCurve sweep(std::span<const DenoiserParam> params, const ImageGrid& x,
                       const Partition& partition, const ReplacementStrategy& strategy,
                       const ImageGrid* clean = nullptr);

/// Same sweep without masking: the raw denoiser g is compared against x
/// directly. For non-J-invariant g this curve says nothing about the
/// ground truth; it exists to demonstrate exactly that.
CalibrationCurve sweep_plain(std::span<const DenoiserParam> params, const ImageGrid& x,
                             const ImageGrid* clean = nullptr);

/// Entry with minimal self-supervised loss; ties break to the smallest
/// parameter (param_less order).
DenoiserParam select_best(const CalibrationCurve& curve);

struct MixingResult {
    double lambda = 0.0;               // weight on f(x); 1 - lambda goes to x
    ImageGrid mixed;
    double predicted_psnr_gain_db = 0.0; // expected gain over f(x) alone
};

/**
 * Optimal convex combination lambda*f(x) + (1-lambda)*x of a J-invariant
 * output with the raw input: lambda = noise_var / ss_loss, predicted gain
 * 10*log10(1 + V/U) with U = noise_var, V = ss_loss - noise_var.
 * Requires 0 < noise_var <= ss_loss.
 */
MixingResult optimal_mixing(const ImageGrid& fx, const ImageGrid& x, double noise_var,
                            double ss_loss);

/// CSV with header "param,ss_loss,gt_loss,psnr"; empty fields when ground
/// truth was absent. Round-trips through read_curve_csv.
void write_curve_csv(std::ostream& out, const CalibrationCurve& curve);
CalibrationCurve read_curve_csv(std::istream& in);

} // namespace jinv

#endif
