#ifndef JINV_MASKING_HPP
#define JINV_MASKING_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "jinv/denoisers.hpp"
#include "jinv/grid.hpp"
#include "jinv/rng.hpp"

namespace jinv {

/// Replace masked pixels with the cross-kernel average of their four
/// neighbors (weights 0.25, mirror boundary).
struct InterpolateNeighbors {};

/// Replace masked pixels with uniform draws from [lo, hi). The seed is part
/// of the strategy, so a fixed seed yields a deterministic, genuinely
/// J-invariant function; supplying a fresh seed per evaluation realizes the
/// "random J-invariant function" reading instead.
struct RandomUniform {
    double lo = 0.0;
    double hi = 1.0;
    Seed seed;
};

using ReplacementStrategy = std::variant<InterpolateNeighbors, RandomUniform>;

/**
 * A base denoiser g made J-invariant by masking: for each subset J of the
 * partition, coordinates in J are replaced by the strategy's field before g
 * runs, and only the J coordinates of the output are kept.
 *
 * With InterpolateNeighbors the construction is exactly J-invariant whenever
 * no two 4-neighbors share a subset (singletons and grid partitions with
 * cell sides >= 2 qualify); RandomUniform never reads the input, so it is
 * exact for any partition.
 */
struct JInvariantDenoiser {
    Denoiser base;
    Partition partition;
    ReplacementStrategy replacement;
};

/// Cross-kernel local average: 0.25*(up + down + left + right), mirror boundary.
ImageGrid interpolate_neighbors(const ImageGrid& x);

/// The full replacement field used by masked evaluation.
ImageGrid replacement_field(const ImageGrid& x, const ReplacementStrategy& strategy);

/// Masked evaluation over every subset: |partition| base-denoiser runs,
/// assembled over disjoint index sets.
ImageGrid evaluate_j_invariant(const JInvariantDenoiser& f, const ImageGrid& x);

struct SingleSubsetResult {
    std::vector<double> values;        // masked-evaluation output on the subset
    std::vector<std::uint32_t> indices; // the subset, in partition order
};

/// Masked evaluation restricted to one subset of the partition.
SingleSubsetResult evaluate_single_j(const JInvariantDenoiser& f, const ImageGrid& x,
                                     std::size_t j_index);

struct JInvarianceReport {
    double max_deviation = 0.0;
    bool pass = false;
    int trials = 0;
};

/// Empirical check of Definition-style invariance: per trial, pick a random
/// subset J, redraw x on J, and compare f(x)_J before and after. Reports the
/// largest L-infinity deviation seen; passes iff it is <= tol.
JInvarianceReport verify_j_invariance(const JInvariantDenoiser& f, const ImageGrid& x,
                                      int trials, Seed seed, double tol);

/// The same probe applied to a bare denoiser with no masking: f(x)_J is just
/// g(x) restricted to J. Natively J-invariant functions (donut median over
/// singletons, constants) pass with tol = 0; a plain median does not.
JInvarianceReport verify_j_invariance_raw(const Denoiser& g, const Partition& partition,
                                          const ImageGrid& x, int trials, Seed seed, double tol);

} // namespace jinv

#endif
