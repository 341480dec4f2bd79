#include "jinv/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jinv/parallel.hpp"

namespace jinv {

ImageGrid interpolate_neighbors(const ImageGrid& x) {
    ImageGrid out(x.width, x.height);
    const int h = x.height, w = x.width;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            out.at(r, c) = 0.25 * (x.at(mirror_index(r - 1, h), c) +
                                   x.at(mirror_index(r + 1, h), c) +
                                   x.at(r, mirror_index(c - 1, w)) +
                                   x.at(r, mirror_index(c + 1, w)));
        }
    }
    return out;
}

ImageGrid replacement_field(const ImageGrid& x, const ReplacementStrategy& strategy) {
    if (std::holds_alternative<InterpolateNeighbors>(strategy)) return interpolate_neighbors(x);
    const auto& ru = std::get<RandomUniform>(strategy);
    if (!(ru.lo < ru.hi)) throw std::invalid_argument("RandomUniform: need lo < hi");
    ImageGrid field(x.width, x.height);
    for (std::size_t j = 0; j < field.size(); ++j) {
        CounterRng rng(ru.seed.value, 0x7265706cULL, j);
        field.values[j] = ru.lo + (ru.hi - ru.lo) * rng.next_unit();
    }
    return field;
}

namespace {

void check_partition(const JInvariantDenoiser& f, const ImageGrid& x) {
    if (f.partition.dims != x.size())
        throw std::invalid_argument("masked evaluation: partition size does not match image");
    f.partition.validate();
}

// Masked run for one subset; writes g(x')_J into out at J.
void run_subset(const JInvariantDenoiser& f, const ImageGrid& x, const ImageGrid& field,
                const std::vector<std::uint32_t>& subset, ImageGrid& out) {
    ImageGrid masked = x;
    for (std::uint32_t idx : subset) masked.values[idx] = field.values[idx];
    const ImageGrid denoised = f.base(masked);
    if (!denoised.same_shape(x))
        throw std::invalid_argument("masked evaluation: base denoiser changed the image shape");
    for (std::uint32_t idx : subset) out.values[idx] = denoised.values[idx];
}

} // namespace

ImageGrid evaluate_j_invariant(const JInvariantDenoiser& f, const ImageGrid& x) {
    check_partition(f, x);
    const ImageGrid field = replacement_field(x, f.replacement);
    ImageGrid out(x.width, x.height);
    parallel_for(0, f.partition.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) run_subset(f, x, field, f.partition.subsets[s], out);
    });
    return out;
}

SingleSubsetResult evaluate_single_j(const JInvariantDenoiser& f, const ImageGrid& x,
                                     std::size_t j_index) {
    check_partition(f, x);
    if (j_index >= f.partition.size())
        throw std::invalid_argument("evaluate_single_j: subset index out of range");
    const ImageGrid field = replacement_field(x, f.replacement);
    const auto& subset = f.partition.subsets[j_index];

    ImageGrid masked = x;
    for (std::uint32_t idx : subset) masked.values[idx] = field.values[idx];
    const ImageGrid denoised = f.base(masked);
    if (!denoised.same_shape(x))
        throw std::invalid_argument("masked evaluation: base denoiser changed the image shape");

    SingleSubsetResult result;
    result.indices = subset;
    result.values.reserve(subset.size());
    for (std::uint32_t idx : subset) result.values.push_back(denoised.values[idx]);
    return result;
}

namespace {

// Shared probe loop: restrict(x, j) must return f(x) on subset j.
template <typename Restrict>
JInvarianceReport probe_invariance(const Partition& partition, const ImageGrid& x, int trials,
                                   Seed seed, double tol, Restrict&& restrict_eval) {
    if (trials < 1) throw std::invalid_argument("verify_j_invariance: trials must be >= 1");
    const auto [mn, mx] = std::minmax_element(x.values.begin(), x.values.end());
    const double lo = *mn - 0.5, hi = *mx + 0.5;

    JInvarianceReport report;
    report.trials = trials;
    for (int t = 0; t < trials; ++t) {
        CounterRng rng(seed.value, 0x76657269667977ULL, static_cast<std::uint64_t>(t));
        const std::size_t j = static_cast<std::size_t>(rng.next_below(partition.size()));
        const auto& subset = partition.subsets[j];

        ImageGrid perturbed = x;
        for (std::uint32_t idx : subset)
            perturbed.values[idx] = lo + (hi - lo) * rng.next_unit();

        const std::vector<double> before = restrict_eval(x, j);
        const std::vector<double> after = restrict_eval(perturbed, j);
        for (std::size_t i = 0; i < before.size(); ++i)
            report.max_deviation = std::max(report.max_deviation, std::fabs(before[i] - after[i]));
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

} // namespace

JInvarianceReport verify_j_invariance(const JInvariantDenoiser& f, const ImageGrid& x,
                                      int trials, Seed seed, double tol) {
    check_partition(f, x);
    return probe_invariance(f.partition, x, trials, seed, tol,
                            [&f](const ImageGrid& img, std::size_t j) {
                                return evaluate_single_j(f, img, j).values;
                            });
}

JInvarianceReport verify_j_invariance_raw(const Denoiser& g, const Partition& partition,
                                          const ImageGrid& x, int trials, Seed seed, double tol) {
    if (partition.dims != x.size())
        throw std::invalid_argument("verify_j_invariance_raw: partition size does not match image");
    partition.validate();
    return probe_invariance(partition, x, trials, seed, tol,
                            [&g, &partition, &x](const ImageGrid& img, std::size_t j) {
                                const ImageGrid out = g(img);
                                if (!out.same_shape(x))
                                    throw std::invalid_argument(
                                        "verify_j_invariance_raw: denoiser changed the shape");
                                std::vector<double> vals;
                                vals.reserve(partition.subsets[j].size());
                                for (std::uint32_t idx : partition.subsets[j])
                                    vals.push_back(out.values[idx]);
                                return vals;
                            });
}

} // namespace jinv
