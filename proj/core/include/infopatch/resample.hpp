#pragma once

#include "infopatch/image.hpp"

namespace infopatch {

/// Integer super-resolution factor, restricted to 2, 3 or 4.
class ScaleFactor {
public:
  /// Throws a Data error listing the supported values when `s` is not 2, 3 or 4.
  explicit ScaleFactor(int s);

  int value() const noexcept { return value_; }

  friend bool operator==(ScaleFactor, ScaleFactor) = default;

private:
  int value_;
};

/// Keys cubic kernel (a = -0.5).
double keys_cubic(double x) noexcept;

/// Top-left sub-image with width and height floored to multiples of s.
Raster crop_to_multiple(const Raster& img, ScaleFactor s);

/// Antialiased bicubic downscale: Keys kernel stretched by s, half-pixel centres,
/// clamp-to-edge, weights normalised per output sample, separable
/// (horizontal pass then vertical pass in double precision). The result is
/// clamped and rounded half away from zero.
Raster bicubic_downscale(const Raster& hr, ScaleFactor s);

/// Same filter without the final quantisation.
FloatRaster bicubic_downscale_real(const Raster& hr, ScaleFactor s);

/// Half-pixel-centre bilinear upscale with clamp-to-edge. Unquantised.
FloatRaster bilinear_upscale(const Raster& lr, ScaleFactor s);

/// Any positive integer factor; factor 1 is the identity.
FloatRaster bilinear_upscale(const Raster& lr, int factor);

}  // namespace infopatch
