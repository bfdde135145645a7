#pragma once

#include <filesystem>

#include "infopatch/image.hpp"
#include "infopatch/importance.hpp"

namespace infopatch {

/// Grayscale raster at anchor-grid resolution. Scores are rank-normalised by
/// informativeness (ties share their average rank) and mapped to
/// 255 * (1 - r), so the most informative anchor is brightest. PSNR +inf
/// anchors render 0.
Raster render_heatmap(const ImportanceMap& map);

void emit_heatmap(const ImportanceMap& map, const std::filesystem::path& path);

}  // namespace infopatch
