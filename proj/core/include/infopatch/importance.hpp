#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "infopatch/image.hpp"
#include "infopatch/resample.hpp"

namespace infopatch {

/// Per-anchor scoring rule. Numeric values are the IIMP metric tag.
enum class MetricKind : std::uint8_t {
  PsnrBilinear = 0,      // PSNR of bilinear(LR) against HR, all channels
  Std0 = 1,              // standard deviation pooled over channels
  Std1 = 2,              // mean of per-channel standard deviations
  Std2 = 3,              // standard deviation of luma
  Sobel = 4,             // mean Sobel gradient magnitude of luma
  Laplacian = 5,         // mean |Laplacian| of luma
  PsnrBilinearLuma = 6,  // PSNR on the luma channel only
};

std::string_view to_string(MetricKind metric) noexcept;
/// Accepts the names produced by to_string; throws a Data error otherwise.
MetricKind parse_metric(std::string_view name);
/// Validates a raw IIMP tag.
MetricKind metric_from_tag(std::uint8_t tag);

bool is_psnr_metric(MetricKind metric) noexcept;

/// PSNR maps rank low scores first; the heuristic metrics rank high scores first.
bool higher_is_more_informative(MetricKind metric) noexcept;

/// Patch size, anchor stride and scale factor, all in HR pixels.
class PatchGeometry {
public:
  /// Throws a Data error unless k >= 1, k % scale == 0 and stride >= 1.
  /// stride defaults to the scale factor.
  PatchGeometry(int patch_size, ScaleFactor scale, std::optional<int> stride = std::nullopt);

  int patch_size() const noexcept { return patch_size_; }
  int stride() const noexcept { return stride_; }
  ScaleFactor scale() const noexcept { return scale_; }

  int anchor_rows(int image_height) const noexcept;
  int anchor_cols(int image_width) const noexcept;

  friend bool operator==(const PatchGeometry&, const PatchGeometry&) = default;

private:
  int patch_size_;
  ScaleFactor scale_;
  int stride_;
};

/// Score for a zero-error patch: +inf, the least informative value.
inline constexpr float kPerfectScore = std::numeric_limits<float>::infinity();

/// Dense score grid over all anchors (u, v) = (row * stride, col * stride).
class ImportanceMap {
public:
  ImportanceMap(int rows, int cols, PatchGeometry geometry, MetricKind metric);
  ImportanceMap(int rows, int cols, PatchGeometry geometry, MetricKind metric,
                std::vector<float> scores);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return scores_.size(); }
  const PatchGeometry& geometry() const noexcept { return geometry_; }
  MetricKind metric() const noexcept { return metric_; }

  float score(int row, int col) const noexcept {
    return scores_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                   static_cast<std::size_t>(col)];
  }
  float& score(int row, int col) noexcept {
    return scores_[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
                   static_cast<std::size_t>(col)];
  }
  std::span<const float> scores() const noexcept { return scores_; }

  int anchor_u(int row) const noexcept { return row * geometry_.stride(); }
  int anchor_v(int col) const noexcept { return col * geometry_.stride(); }

  friend bool operator==(const ImportanceMap&, const ImportanceMap&) = default;

private:
  int rows_;
  int cols_;
  PatchGeometry geometry_;
  MetricKind metric_;
  std::vector<float> scores_;
};

/// Bitwise equality of scores (distinguishes +0/-0 and compares NaN payloads).
bool identical_scores(const ImportanceMap& a, const ImportanceMap& b) noexcept;

/// Mean squared error over all samples of two equally sized blocks.
double patch_mse(std::span<const float> sr, std::span<const std::uint8_t> hr);

/// 10 log10(255^2 / mse); mse == 0 yields +inf.
double mse_to_psnr(double mse);

/// PSNR map from integral images of HR*HR, SR*SR and HR*SR, where SR is the
/// bilinear upscale of the whole LR image. O(H W) build, O(1) per anchor.
/// `metric` must be PsnrBilinear or PsnrBilinearLuma.
ImportanceMap score_map_fast(const Raster& hr, const Raster& lr, const PatchGeometry& geometry,
                             MetricKind metric = MetricKind::PsnrBilinear);

/// Sliding-window reference for score_map_fast: same fixed-point planes, one
/// explicit double loop per anchor. Produces bit-identical scores.
ImportanceMap score_map_naive(const Raster& hr, const Raster& lr, const PatchGeometry& geometry,
                              MetricKind metric = MetricKind::PsnrBilinear);

/// HR-only heuristic scores (std0, std1, std2, sobel, laplacian).
ImportanceMap score_map_alternative(const Raster& hr, MetricKind metric,
                                    const PatchGeometry& geometry);

/// Dispatches on `metric`; lr is ignored by the heuristic metrics.
ImportanceMap score_map(const Raster& hr, const Raster& lr, const PatchGeometry& geometry,
                        MetricKind metric);

/// Filter responses the sobel and laplacian metrics average over each patch.
/// Operators run on luma (or on the single channel of grayscale input) with
/// 3x3 stencils and clamp-to-edge borders.
std::vector<double> sobel_magnitude(const Raster& hr);
std::vector<double> laplacian_magnitude(const Raster& hr);

}  // namespace infopatch
