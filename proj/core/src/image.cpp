#include "infopatch/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infopatch/error.hpp"

namespace infopatch {

namespace {

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw_data_error("raster dimensions must be at least 1x1, got " + std::to_string(width) +
                     "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw_data_error("raster must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

std::size_t sample_count(int width, int height, int channels) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         static_cast<std::size_t>(channels);
}

// BT.601 studio-swing weights scaled for 8-bit input.
constexpr double kLumaR = 65.481 / 255.0;
constexpr double kLumaG = 128.553 / 255.0;
constexpr double kLumaB = 24.966 / 255.0;

template <typename Src>
FloatRaster luma_of(const Src& src) {
  if (src.channels() != 3) {
    throw_data_error("rgb_to_luma requires 3 channels, got " + std::to_string(src.channels()));
  }
  FloatRaster out(src.width(), src.height(), 1);
  const auto in = src.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double r = in[3 * i];
    const double g = in[3 * i + 1];
    const double b = in[3 * i + 2];
    dst[i] = static_cast<float>(16.0 + kLumaR * r + kLumaG * g + kLumaB * b);
  }
  return out;
}

}  // namespace

Raster::Raster(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(sample_count(width, height, channels), 0);
}

Raster::Raster(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  if (data_.size() != sample_count(width, height, channels)) {
    throw_data_error("raster data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(width) + "x" + std::to_string(height) + "x" +
                     std::to_string(channels));
  }
}

Raster Raster::crop(int row, int col, int w, int h) const {
  if (row < 0 || col < 0 || w < 1 || h < 1 || row + h > height_ || col + w > width_) {
    throw_data_error("crop " + std::to_string(w) + "x" + std::to_string(h) + " at (" +
                     std::to_string(row) + ", " + std::to_string(col) + ") exceeds " +
                     std::to_string(width_) + "x" + std::to_string(height_) + " raster");
  }
  Raster out(w, h, channels_);
  const std::size_t row_bytes = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels_);
  for (int r = 0; r < h; ++r) {
    const std::uint8_t* src = &data_[index(row + r, col, 0)];
    std::copy(src, src + row_bytes, &out.data_[out.index(r, 0, 0)]);
  }
  return out;
}

FloatRaster::FloatRaster(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(sample_count(width, height, channels), 0.0f);
}

FloatRaster to_float(const Raster& raster) {
  FloatRaster out(raster.width(), raster.height(), raster.channels());
  std::copy(raster.data().begin(), raster.data().end(), out.data().begin());
  return out;
}

std::uint8_t quantize_sample(double value) noexcept {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(value));
}

Raster quantize(const FloatRaster& raster) {
  Raster out(raster.width(), raster.height(), raster.channels());
  const auto src = raster.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize_sample(src[i]);
  return out;
}

FloatRaster rgb_to_luma(const Raster& raster) { return luma_of(raster); }
FloatRaster rgb_to_luma(const FloatRaster& raster) { return luma_of(raster); }

}  // namespace infopatch
