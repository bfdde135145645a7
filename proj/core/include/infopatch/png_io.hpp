#pragma once

#include <filesystem>

#include "infopatch/image.hpp"

namespace infopatch {

/// Reads an 8-bit grayscale or RGB PNG. Alpha, palette and non-8-bit depths are
/// rejected with a Data error naming the offending property.
Raster load_image(const std::filesystem::path& path);

/// Writes a lossless PNG. Output bytes depend only on the raster contents.
void save_image(const Raster& raster, const std::filesystem::path& path);

/// Quantizes (clamp, round half away from zero) and writes.
void save_image(const FloatRaster& raster, const std::filesystem::path& path);

}  // namespace infopatch
