#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "infopatch/error.hpp"
#include "infopatch/image.hpp"

namespace infopatch {

__extension__ typedef __int128 Int128;

namespace detail {

template <typename Acc>
constexpr Acc accumulator_max() noexcept {
  if constexpr (std::is_same_v<Acc, Int128>) {
    return ((static_cast<Int128>(1) << 126) - 1) * 2 + 1;
  } else {
    return std::numeric_limits<Acc>::max();
  }
}

template <typename T>
constexpr T magnitude(T value) noexcept {
  return value < 0 ? -value : value;
}

}  // namespace detail

/// Summed-area table with the exclusive-prefix convention: cell (i, j) holds the
/// sum of all source samples with row < i and col < j, so the grid is
/// (height + 1) x (width + 1) with a zero first row and column.
///
/// For integer accumulators the constructor verifies that
/// max|sample| * width * height is representable, which makes every cell and
/// every rectangle sum exact.
template <typename Acc>
class BasicIntegralImage {
public:
  /// Row-at-a-time construction. For integer accumulators every sample must
  /// satisfy |sample| <= sample_bound; the bound is checked against the
  /// accumulator range up front and per sample as rows arrive.
  class Builder {
  public:
    Builder(int width, int height, Int128 sample_bound, std::string source = {}) {
      if (width < 1 || height < 1) {
        throw_data_error("integral image: plane must be at least 1x1");
      }
      table_.width_ = width;
      table_.height_ = height;
      table_.source_ = std::move(source);
      const auto w = static_cast<std::size_t>(width);
      const auto h = static_cast<std::size_t>(height);
      if constexpr (std::is_integral_v<Acc> || std::is_same_v<Acc, Int128>) {
        if (sample_bound < 0 ||
            (sample_bound != 0 && sample_bound > detail::accumulator_max<Acc>() / static_cast<Int128>(w * h))) {
          throw_data_error("integral image: accumulator bound exceeded for " + std::to_string(width) + "x" +
                           std::to_string(height) + " plane");
        }
      }
      bound_ = sample_bound;
      table_.cells_ = std::make_unique_for_overwrite<Acc[]>((w + 1) * (h + 1));
      std::fill_n(table_.cells_.get(), w + 1, Acc{0});
    }

    template <typename T>
    void push_row(std::span<const T> src) {
      const auto w = static_cast<std::size_t>(table_.width_);
      if (next_ >= static_cast<std::size_t>(table_.height_) || src.size() != w) {
        throw_data_error("integral image: row does not fit the plane");
      }
      if constexpr (std::is_integral_v<Acc> || std::is_same_v<Acc, Int128>) {
        T lo{0};
        T hi{0};
        for (const T value : src) {
          lo = value < lo ? value : lo;
          hi = value > hi ? value : hi;
        }
        if (detail::magnitude(static_cast<Int128>(lo)) > bound_ || static_cast<Int128>(hi) > bound_) {
          throw_data_error("integral image: sample exceeds the declared bound");
        }
      }
      const Acc* above = table_.cells_.get() + next_ * (w + 1);
      Acc* row = table_.cells_.get() + (next_ + 1) * (w + 1);
      row[0] = Acc{0};
      Acc running{0};
      for (std::size_t j = 0; j < w; ++j) {
        running += static_cast<Acc>(src[j]);
        row[j + 1] = above[j + 1] + running;
      }
      ++next_;
    }

    BasicIntegralImage finish() && {
      if (next_ != static_cast<std::size_t>(table_.height_)) {
        throw_data_error("integral image: missing rows");
      }
      return std::move(table_);
    }

  private:
    BasicIntegralImage table_;
    Int128 bound_ = 0;
    std::size_t next_ = 0;
  };

  BasicIntegralImage() = default;

  template <typename T>
  BasicIntegralImage(std::span<const T> plane, int width, int height, std::string source = {}) {
    if (width < 1 || height < 1) {
      throw_data_error("integral image: plane must be at least 1x1");
    }
    const auto w = static_cast<std::size_t>(width);
    const auto h = static_cast<std::size_t>(height);
    if (plane.size() != w * h) {
      throw_data_error("integral image: plane size does not match dimensions");
    }
    Int128 peak = 0;
    if constexpr (std::is_integral_v<Acc> || std::is_same_v<Acc, Int128>) {
      T lo{0};
      T hi{0};
      for (const T value : plane) {
        lo = value < lo ? value : lo;
        hi = value > hi ? value : hi;
      }
      peak = std::max(detail::magnitude(static_cast<Int128>(lo)), static_cast<Int128>(hi));
    }
    Builder builder(width, height, peak, std::move(source));
    for (std::size_t i = 0; i < h; ++i) builder.push_row(plane.subspan(i * w, w));
    *this = std::move(builder).finish();
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::string& source() const noexcept { return source_; }

  /// Grid cell (row, col), 0 <= row <= height, 0 <= col <= width.
  Acc at(int row, int col) const noexcept {
    return cells_[static_cast<std::size_t>(row) * (static_cast<std::size_t>(width_) + 1) +
                  static_cast<std::size_t>(col)];
  }

  /// Sum over rows [u, u + h) and cols [v, v + w). No bounds checks.
  Acc rect_sum_unchecked(int u, int v, int h, int w) const noexcept {
    return at(u + h, v + w) + at(u, v) - at(u + h, v) - at(u, v + w);
  }

  /// Sum over the k x k window anchored at (u, v); throws when out of bounds.
  Acc window_sum(int u, int v, int k) const {
    if (k < 1 || u < 0 || v < 0 || u + k > height_ || v + k > width_) {
      throw_data_error("window_sum: window out of bounds");
    }
    return rect_sum_unchecked(u, v, k, k);
  }

  Acc total() const noexcept { return at(height_, width_); }

private:
  int width_ = 0;
  int height_ = 0;
  std::string source_;
  std::unique_ptr<Acc[]> cells_;
};

/// Exact table for products of 8-bit samples.
using IntegralImage = BasicIntegralImage<std::int64_t>;
/// Exact table for fixed-point products.
using WideIntegralImage = BasicIntegralImage<Int128>;
/// Floating table for real-valued responses (gradient magnitudes and the like).
using RealIntegralImage = BasicIntegralImage<double>;

/// Number of fractional bits used when a real-valued raster enters the
/// integer domain.
inline constexpr int kFixedShift = 16;

/// Integer image: sample = round(real * 2^shift). 8-bit rasters convert with
/// shift 0, real rasters with kFixedShift.
struct FixedImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int shift = 0;
  std::vector<std::int64_t> data;  // interleaved like Raster
};

FixedImage to_fixed(const Raster& raster);
FixedImage to_fixed(const FloatRaster& raster);

/// Rounds a real sample onto the 2^-16 grid, half away from zero. Exact for
/// |value| < 2^36.
std::int64_t to_fixed_sample(float value) noexcept;

/// Per-channel element-wise products. Each plane holds a[c] * b[c] scaled by
/// 2^shift where shift = a.shift + b.shift.
struct ProductPlanes {
  int width = 0;
  int height = 0;
  int shift = 0;
  std::vector<std::vector<std::int64_t>> planes;
};

ProductPlanes product_planes(const FixedImage& a, const FixedImage& b);
ProductPlanes product_planes(const Raster& a, const Raster& b);
ProductPlanes product_planes(const Raster& a, const FloatRaster& b);
ProductPlanes product_planes(const FloatRaster& a, const FloatRaster& b);

/// One exact table per product plane.
std::vector<IntegralImage> build_integral(const ProductPlanes& products);

}  // namespace infopatch
