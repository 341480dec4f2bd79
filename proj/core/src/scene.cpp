#include "jinv/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jinv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double uniform(CounterRng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_unit();
}

} // namespace

ImageGrid make_scene(Seed seed, int width, int height, const SceneOptions& options) {
    if (width < 4 || height < 4) throw std::invalid_argument("make_scene: image too small");
    CounterRng rng(seed.value, 0x7363656e65ULL, 0);
    ImageGrid img(width, height);

    // smooth background
    const double fx = uniform(rng, 0.5, 1.5), fy = uniform(rng, 0.5, 1.5);
    const double phx = uniform(rng, 0.0, kTwoPi), phy = uniform(rng, 0.0, kTwoPi);
    const double amp = uniform(rng, 0.06, 0.12);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            img.at(r, c) = 0.5 + amp * std::cos(kTwoPi * fx * c / width + phx) *
                                     std::cos(kTwoPi * fy * r / height + phy);

    // piecewise-constant shapes
    const int shapes = 6 + static_cast<int>(rng.next_below(6));
    for (int s = 0; s < shapes; ++s) {
        const double v = uniform(rng, 0.25, 0.75);
        if (rng.next_unit() < 0.5) {
            const double cx = uniform(rng, 0, width), cy = uniform(rng, 0, height);
            const double rad = uniform(rng, 6, 24);
            for (int r = 0; r < height; ++r)
                for (int c = 0; c < width; ++c)
                    if ((c - cx) * (c - cx) + (r - cy) * (r - cy) <= rad * rad) img.at(r, c) = v;
        } else {
            const double x0 = uniform(rng, 0, width - 8), y0 = uniform(rng, 0, height - 8);
            const double ww = uniform(rng, 8, 40), hh = uniform(rng, 8, 40);
            for (int r = 0; r < height; ++r)
                for (int c = 0; c < width; ++c)
                    if (c >= x0 && c < x0 + ww && r >= y0 && r < y0 + hh) img.at(r, c) = v;
        }
    }

    // soft radial bumps
    const int bumps = 2 + static_cast<int>(rng.next_below(3));
    for (int b = 0; b < bumps; ++b) {
        const double cx = uniform(rng, 0, width), cy = uniform(rng, 0, height);
        const double s = uniform(rng, 8, 20), a = uniform(rng, -0.2, 0.2);
        const double inv = 1.0 / (2.0 * s * s);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                img.at(r, c) += a * std::exp(-((c - cx) * (c - cx) + (r - cy) * (r - cy)) * inv);
    }

    // band-limited texture: random cosines with wavelengths of 3-10 pixels
    if (options.texture > 0.0) {
        constexpr int kWaves = 40;
        const double scale = options.texture / std::sqrt(kWaves / 2.0);
        std::vector<double> ux(kWaves), uy(kWaves), ph(kWaves);
        for (int i = 0; i < kWaves; ++i) {
            const double wavelength = uniform(rng, 3.0, 10.0);
            const double theta = uniform(rng, 0.0, kTwoPi);
            ux[i] = std::cos(theta) / wavelength;
            uy[i] = std::sin(theta) / wavelength;
            ph[i] = uniform(rng, 0.0, kTwoPi);
        }
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                double t = 0.0;
                for (int i = 0; i < kWaves; ++i)
                    t += std::cos(kTwoPi * (ux[i] * c + uy[i] * r) + ph[i]);
                img.at(r, c) += scale * t;
            }
    }

    for (double& v : img.values) v = std::clamp(v, 0.1, 0.9);
    return img;
}

} // namespace jinv
