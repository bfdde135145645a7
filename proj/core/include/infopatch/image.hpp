#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace infopatch {

/// 8-bit raster, row-major, channel-interleaved (RGB order when channels == 3).
class Raster {
public:
  Raster() = default;
  Raster(int width, int height, int channels);
  Raster(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int row, int col, int channel = 0) const noexcept {
    return data_[index(row, col, channel)];
  }
  std::uint8_t& at(int row, int col, int channel = 0) noexcept {
    return data_[index(row, col, channel)];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  /// Copy of the h x w sub-image whose top-left corner is (row, col).
  Raster crop(int row, int col, int w, int h) const;

  friend bool operator==(const Raster&, const Raster&) = default;

private:
  std::size_t index(int row, int col, int channel) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) * static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Real-valued raster for resampled intermediates and luminance planes. Stored
/// samples are always finite.
class FloatRaster {
public:
  FloatRaster() = default;
  FloatRaster(int width, int height, int channels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  float at(int row, int col, int channel = 0) const noexcept { return data_[index(row, col, channel)]; }
  float& at(int row, int col, int channel = 0) noexcept { return data_[index(row, col, channel)]; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

private:
  std::size_t index(int row, int col, int channel) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(col)) * static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

FloatRaster to_float(const Raster& raster);

/// Clamp to [0, 255] and round half away from zero.
std::uint8_t quantize_sample(double value) noexcept;

/// Quantizes every sample with quantize_sample.
Raster quantize(const FloatRaster& raster);

/// Studio-swing BT.601 luma: Y = 16 + (65.481 R + 128.553 G + 24.966 B) / 255.
/// Requires 3 channels; output lies in [16, 235] for 8-bit input.
FloatRaster rgb_to_luma(const Raster& raster);
FloatRaster rgb_to_luma(const FloatRaster& raster);

}  // namespace infopatch
