#ifndef JINV_COUNTS_HPP
#define JINV_COUNTS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jinv/grid.hpp"
#include "jinv/rng.hpp"

namespace jinv {

/// Nonnegative integer cells x genes matrix, row-major. Row and column names
/// are optional (empty vectors); writers synthesize them when absent.
struct CountMatrix {
    int rows = 0; // cells
    int cols = 0; // genes
    std::vector<std::int64_t> counts;
    std::vector<std::string> cell_ids;
    std::vector<std::string> gene_names;

    CountMatrix() = default;
    CountMatrix(int r, int c, std::int64_t fill = 0);

    std::int64_t& at(int r, int c) { return counts[static_cast<std::size_t>(r) * cols + c]; }
    std::int64_t at(int r, int c) const { return counts[static_cast<std::size_t>(r) * cols + c]; }
};

struct NormalizationSpec {
    enum class Rho { kSqrt, kLog1p };
    double n0 = 1.0; // reference total count; defaults to the median row sum
    Rho rho = Rho::kSqrt;
};

/// Median of the row totals (mean of the two central values for even rows).
double median_row_sum(const CountMatrix& c);

/**
 * Per-entry binomial thinning: each molecule lands in the first half with
 * probability p, independently. The halves sum back to the input exactly
 * and are independent conditional on the underlying rates. Deterministic
 * given the seed.
 */
std::pair<CountMatrix, CountMatrix> split_counts(const CountMatrix& c, double p, Seed seed);

/// z = rho(n0 * count / N_row). Throws DegenerateRowError when any row sums
/// to zero, listing the offending rows.
RealMatrix normalize(const CountMatrix& c, const NormalizationSpec& spec);

/**
 * Rank-k principal component regression: center source and target, take the
 * top-k principal directions of the source, regress the centered target on
 * the scores. Component signs are fixed (first nonzero loading positive)
 * for reproducibility.
 */
struct PcrModel {
    int k = 0;
    std::vector<double> source_mean;
    std::vector<double> target_mean;
    RealMatrix components;   // source_cols x k, orthonormal columns
    RealMatrix coefficients; // k x target_cols
};

PcrModel pcr_fit(const RealMatrix& source, const RealMatrix& target, int k);
RealMatrix pcr_predict(const PcrModel& model, const RealMatrix& source);

struct RankCurvePoint {
    int k = 0;
    double loss = 0.0;
};

/**
 * Self-supervised rank selection on two independent halves: for each k,
 * the rank-k principal-component reconstruction fitted on one half predicts
 * the other, in both directions, with the mean squared prediction error per
 * entry. Independent halves give the curve an interior minimum near the true
 * rank; feeding the same matrix twice degenerates into a monotone
 * reconstruction error, which is exactly why the split matters.
 */
std::vector<RankCurvePoint> self_supervised_rank_curve(const RealMatrix& x1, const RealMatrix& x2,
                                                       std::span<const int> k_range);

/**
 * Owen-Perry bi-cross-validation: rows are dealt into row_folds folds; for
 * each k, fold and direction, a PCR fit on (training rows, one column block)
 * predicts the other column block on the held-out rows. All four
 * orientations (train/validation swap x column-block swap) contribute; the
 * loss is the total squared prediction error per predicted entry.
 * col_split must partition the columns into exactly two nonempty blocks.
 */
std::vector<RankCurvePoint> bicv(const RealMatrix& x, std::span<const int> k_range, int row_folds,
                                 const Partition& col_split, Seed seed);

/// CSV with a header of gene names and a first column of cell identifiers.
void write_count_matrix_csv(std::ostream& out, const CountMatrix& c);
CountMatrix read_count_matrix_csv(std::istream& in);

/// Same layout with real entries.
void write_real_matrix_csv(std::ostream& out, const RealMatrix& m,
                           const std::vector<std::string>& row_ids = {},
                           const std::vector<std::string>& col_names = {});
RealMatrix read_real_matrix_csv(std::istream& in);

/// CSV "k,loss".
void write_rank_curve_csv(std::ostream& out, std::span<const RankCurvePoint> curve);
std::vector<RankCurvePoint> read_rank_curve_csv(std::istream& in);

} // namespace jinv

#endif
