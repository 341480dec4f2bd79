#include "jinv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jinv/rng.hpp"

namespace jinv {

ImageGrid::ImageGrid(int w, int h, double fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("ImageGrid: width and height must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

bool ImageGrid::finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

RealMatrix::RealMatrix(int r, int c, double fill) : rows(r), cols(c) {
    if (r < 1 || c < 1) throw std::invalid_argument("RealMatrix: rows and cols must be positive");
    values.assign(static_cast<std::size_t>(r) * c, fill);
}

void Partition::validate() const {
    if (dims == 0) throw std::invalid_argument("Partition: dims must be positive");
    std::vector<char> seen(dims, 0);
    for (const auto& subset : subsets) {
        if (subset.empty()) throw std::invalid_argument("Partition: empty subset");
        for (std::uint32_t idx : subset) {
            if (idx >= dims) throw std::invalid_argument("Partition: index out of range");
            if (seen[idx]) throw std::invalid_argument("Partition: subsets not disjoint");
            seen[idx] = 1;
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }))
        throw std::invalid_argument("Partition: subsets do not cover all indices");
}

Partition partition_singletons(std::size_t m) {
    if (m == 0) throw std::invalid_argument("partition_singletons: m must be >= 1");
    Partition p;
    p.dims = m;
    p.subsets.resize(m);
    for (std::size_t i = 0; i < m; ++i) p.subsets[i] = {static_cast<std::uint32_t>(i)};
    return p;
}

Partition partition_grid(int width, int height, int gw, int gh) {
    if (width < 1 || height < 1) throw std::invalid_argument("partition_grid: bad raster shape");
    if (gw < 1 || gh < 1 || gw > width || gh > height)
        throw std::invalid_argument("partition_grid: cell shape must satisfy 1 <= gw <= width, 1 <= gh <= height");
    Partition p;
    p.dims = static_cast<std::size_t>(width) * height;
    p.subsets.resize(static_cast<std::size_t>(gw) * gh);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const std::size_t subset = static_cast<std::size_t>(r % gh) * gw + (c % gw);
            p.subsets[subset].push_back(static_cast<std::uint32_t>(r * width + c));
        }
    }
    return p;
}

Partition partition_random(std::size_t m, std::size_t k, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("partition_random: m must be >= 1");
    if (k == 0 || k > m) throw std::invalid_argument("partition_random: need 1 <= k <= m");

    CounterRng rng(seed, 0x7061727469746eULL, 0);
    Partition p;
    p.dims = m;

    // Rejection loop: i.i.d. uniform assignment, redrawn whole while any
    // subset is empty. Success probability collapses when k approaches m,
    // so cap the attempts and fall back to dealing one index per subset.
    constexpr int kMaxAttempts = 1000;
    std::vector<std::uint32_t> assignment(m);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto s = static_cast<std::uint32_t>(rng.next_below(static_cast<std::uint64_t>(k)));
            assignment[i] = s;
            ++counts[s];
        }
        if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; })) {
            p.subsets.assign(k, {});
            for (std::size_t i = 0; i < m; ++i)
                p.subsets[assignment[i]].push_back(static_cast<std::uint32_t>(i));
            return p;
        }
    }

    // Fallback: shuffle, deal the first k indices one per subset, assign the
    // rest uniformly. Never produces an empty subset.
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t i = m; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(order[i - 1], order[j]);
    }
    p.subsets.assign(k, {});
    for (std::size_t i = 0; i < k; ++i) p.subsets[i].push_back(order[i]);
    for (std::size_t i = k; i < m; ++i)
        p.subsets[static_cast<std::size_t>(rng.next_below(k))].push_back(order[i]);
    for (auto& subset : p.subsets) std::sort(subset.begin(), subset.end());
    return p;
}

std::vector<double> gather(const ImageGrid& img, std::span<const std::uint32_t> indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::uint32_t idx : indices) {
        if (idx >= img.size()) throw std::invalid_argument("gather: index out of range");
        out.push_back(img.values[idx]);
    }
    return out;
}

ImageGrid scatter(const ImageGrid& img, std::span<const std::uint32_t> indices,
                  std::span<const double> vals) {
    if (indices.size() != vals.size())
        throw std::invalid_argument("scatter: index/value length mismatch");
    ImageGrid out = img;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= out.size()) throw std::invalid_argument("scatter: index out of range");
        out.values[indices[i]] = vals[i];
    }
    return out;
}

int mirror_index(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

} // namespace jinv
