#ifndef JINV_PGM_HPP
#define JINV_PGM_HPP

#include <filesystem>

#include "jinv/grid.hpp"

namespace jinv {

/**
 * Binary portable graymap (P5) with 16-bit big-endian samples, maxval 65535.
 * Intensities map linearly: 0.0 <-> 0, 1.0 <-> 65535; values are clamped to
 * [0,1] on write. Reading divides by maxval, so 8-bit files load too.
 */
void write_pgm16(const std::filesystem::path& path, const ImageGrid& img);
ImageGrid read_pgm16(const std::filesystem::path& path);

} // namespace jinv

#endif
