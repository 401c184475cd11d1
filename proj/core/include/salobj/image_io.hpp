#pragma once

#include <filesystem>

#include "salobj/raster.hpp"

namespace salobj {

/// Reads a binary PPM (P6) or PNG file, chosen by magic bytes.
///
/// PNG grayscale is replicated to RGB, alpha is dropped, and 16-bit channels
/// are right-shifted to 8 bits. Palette PNGs are rejected.
RgbImage load_image(const std::filesystem::path& path);

void save_ppm(const RgbImage& img, const std::filesystem::path& path);

/// Reads a P5 PGM as a mask; samples >= half the max value are foreground.
BinaryMask load_mask(const std::filesystem::path& path);

/// Reads a P5 PGM as a map with values sample / maxval.
GrayMap load_map(const std::filesystem::path& path);

/// Writes 0 / 255.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Writes round(255 * clamp(v, 0, 1)).
void save_map(const GrayMap& map, const std::filesystem::path& path);

} // namespace salobj
