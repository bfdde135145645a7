#include "infopatch/integral.hpp"

#include <cmath>

namespace infopatch {

std::int64_t to_fixed_sample(float value) noexcept {
  // value * 2^16 is exact in double, and so is adding one half below 2^52.
  const double x = static_cast<double>(value) * static_cast<double>(std::int64_t{1} << kFixedShift);
  return static_cast<std::int64_t>(x < 0.0 ? x - 0.5 : x + 0.5);
}

FixedImage to_fixed(const Raster& raster) {
  FixedImage out{raster.width(), raster.height(), raster.channels(), 0, {}};
  out.data.assign(raster.data().begin(), raster.data().end());
  return out;
}

FixedImage to_fixed(const FloatRaster& raster) {
  FixedImage out{raster.width(), raster.height(), raster.channels(), kFixedShift, {}};
  const auto src = raster.data();
  out.data.resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out.data[i] = to_fixed_sample(src[i]);
  return out;
}

ProductPlanes product_planes(const FixedImage& a, const FixedImage& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
    throw_data_error("product_planes: shape mismatch (" + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + "x" + std::to_string(a.channels) + " vs " +
                     std::to_string(b.width) + "x" + std::to_string(b.height) + "x" +
                     std::to_string(b.channels) + ")");
  }
  ProductPlanes out{a.width, a.height, a.shift + b.shift, {}};
  const std::size_t pixels = static_cast<std::size_t>(a.width) * static_cast<std::size_t>(a.height);
  const auto channels = static_cast<std::size_t>(a.channels);
  out.planes.assign(channels, std::vector<std::int64_t>(pixels));
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      out.planes[c][p] = a.data[p * channels + c] * b.data[p * channels + c];
    }
  }
  return out;
}

ProductPlanes product_planes(const Raster& a, const Raster& b) {
  return product_planes(to_fixed(a), to_fixed(b));
}

ProductPlanes product_planes(const Raster& a, const FloatRaster& b) {
  return product_planes(to_fixed(a), to_fixed(b));
}

ProductPlanes product_planes(const FloatRaster& a, const FloatRaster& b) {
  return product_planes(to_fixed(a), to_fixed(b));
}

std::vector<IntegralImage> build_integral(const ProductPlanes& products) {
  std::vector<IntegralImage> tables;
  tables.reserve(products.planes.size());
  for (std::size_t c = 0; c < products.planes.size(); ++c) {
    tables.emplace_back(std::span<const std::int64_t>(products.planes[c]), products.width,
                        products.height, "product[c=" + std::to_string(c) + "]");
  }
  return tables;
}

}  // namespace infopatch
