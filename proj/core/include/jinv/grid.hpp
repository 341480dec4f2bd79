#ifndef JINV_GRID_HPP
#define JINV_GRID_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jinv {

/**
 * 2-D real-valued raster, row-major, nominal intensity range [0,1].
 * Carries both clean signals and noisy measurements; values are doubles
 * and must stay finite.
 */
struct ImageGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major, size width*height

    ImageGrid() = default;
    ImageGrid(int w, int h, double fill = 0.0);

    std::size_t size() const { return values.size(); }
    double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }

    bool same_shape(const ImageGrid& other) const {
        return width == other.width && height == other.height;
    }
    /// True when every value is finite (no NaN/Inf).
    bool finite() const;
};

/// Dense real matrix, row-major. Plumbing carrier for sample-by-feature data.
struct RealMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values; // row-major, size rows*cols

    RealMatrix() = default;
    RealMatrix(int r, int c, double fill = 0.0);

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/**
 * Disjoint index subsets covering {0, ..., dims-1}. Subsets are never empty.
 */
struct Partition {
    std::size_t dims = 0;
    std::vector<std::vector<std::uint32_t>> subsets;

    std::size_t size() const { return subsets.size(); }
    /// Throws std::invalid_argument if the subsets are not a partition of
    /// {0,...,dims-1} or any subset is empty.
    void validate() const;
};

/// One subset per index: {{0},{1},...,{m-1}}.
Partition partition_singletons(std::size_t m);

/// Residue-class partition of a width x height raster: pixel (r,c) belongs to
/// the subset indexed by (r mod gh, c mod gw). gw*gh subsets, each nonempty.
Partition partition_grid(int width, int height, int gw, int gh);

/// Uniform independent assignment of m indices to k subsets, redrawn while
/// any subset is empty (bounded; falls back to a dealt assignment when the
/// rejection loop cannot terminate in reasonable time, e.g. k == m).
Partition partition_random(std::size_t m, std::size_t k, std::uint64_t seed);

/// Extract values at the given indices, in index order.
std::vector<double> gather(const ImageGrid& img, std::span<const std::uint32_t> indices);

/// Copy of img with the given indices replaced by vals (same order).
ImageGrid scatter(const ImageGrid& img, std::span<const std::uint32_t> indices,
                  std::span<const double> vals);

/// Mirror (reflect-101) index into [0, n). n >= 1.
int mirror_index(int i, int n);

} // namespace jinv

#endif
