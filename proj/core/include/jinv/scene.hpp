#ifndef JINV_SCENE_HPP
#define JINV_SCENE_HPP

#include "jinv/grid.hpp"
#include "jinv/rng.hpp"

namespace jinv {

struct SceneOptions {
    // Standard deviation of the band-limited texture field layered on top of
    // the shapes; 0 produces purely piecewise-smooth content.
    double texture = 0.07;
};

/**
 * Seeded synthetic test scene: a smooth low-frequency background, a handful
 * of constant-intensity rectangles and disks, soft radial bumps, and an
 * optional fine-grained texture, clamped to [0.1, 0.9] so moderate additive
 * noise stays inside the unit range.
 */
ImageGrid make_scene(Seed seed, int width, int height, const SceneOptions& options = {});

} // namespace jinv

#endif
