#ifndef JINV_DENOISERS_HPP
#define JINV_DENOISERS_HPP

#include <functional>
#include <string>
#include <variant>

#include "jinv/grid.hpp"

namespace jinv {

struct MedianRadius {
    int radius = 1;
    bool include_center = true; // false = "donut" median, hole at the center
};

struct WaveletThreshold {
    double threshold = 0.0;
    int levels = 3;
};

struct NlmCutoff {
    double cutoff = 0.1; // weight falloff scale h
    int patch = 5;       // odd
    int window = 11;     // odd, >= patch
};

using DenoiserParam = std::variant<MedianRadius, WaveletThreshold, NlmCutoff>;

/// A denoiser is any image-to-image map of fixed shape.
using Denoiser = std::function<ImageGrid(const ImageGrid&)>;

/**
 * Median over the disk {(dr,dc): dr^2+dc^2 <= r^2} around each pixel,
 * optionally excluding the center. Mirror boundary; the median of an even
 * count is the mean of the two central order statistics.
 */
ImageGrid median_filter(const ImageGrid& x, int radius, bool include_center);

/**
 * Multi-level 2-D Haar transform, soft-threshold of every detail coefficient
 * by t, inverse transform. Sides are mirror-padded to multiples of 2^levels
 * internally and cropped afterwards. Orthonormal scaling, so t is directly
 * comparable to the pixel noise level.
 */
ImageGrid haar_wavelet_denoise(const ImageGrid& x, double threshold, int levels);

/**
 * Non-local means: output_j = sum_k w_jk x_k / sum_k w_jk over the window
 * around j, with w_jk = exp(-D_jk / h^2) and D_jk the mean squared difference
 * between the patches around j and k. Mirror boundary; the self patch is
 * included (w_jj = 1).
 */
ImageGrid nl_means(const ImageGrid& x, double cutoff, int patch, int window);

/// Dispatch on the parameter variant.
ImageGrid denoise(const ImageGrid& x, const DenoiserParam& param);

/// Denoiser bound to a fixed parameter.
Denoiser make_denoiser(const DenoiserParam& param);

/// Single-token-free labels like "median r=3 donut", "wavelet t=0.15 levels=3",
/// "nlm h=0.12 patch=5 window=11". Round-trips through parse_denoiser_param.
std::string format_denoiser_param(const DenoiserParam& param);
DenoiserParam parse_denoiser_param(const std::string& label);

/// Ordering used for tie-breaks: by kind, then by the scalar hyperparameter
/// (radius, threshold, cutoff), smallest first.
bool param_less(const DenoiserParam& a, const DenoiserParam& b);

} // namespace jinv

#endif
