#pragma once

#include <cstdint>
#include <filesystem>

#include "cactuss/grid.hpp"
#include "cactuss/metrics.hpp"

namespace cactuss {

using Image8 = Grid2D<std::uint8_t>;

/// round(255 * x), x clamped to [0, 1].
Image8 to_gray8(const ImageF& img);
/// 0 -> 0, 1 -> 255.
Image8 mask_to_gray8(const SegMask& mask);
/// Accepts {0, 255} or {0, 1} images; anything else is a FormatError.
SegMask gray8_to_mask(const Image8& img, double spacing_mm);

void write_png(const std::filesystem::path& path, const Image8& img);
/// Reads any 8-bit PNG, converting colour images to grayscale.
Image8 read_png(const std::filesystem::path& path);

}  // namespace cactuss
