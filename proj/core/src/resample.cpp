#include "infopatch/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "infopatch/error.hpp"

namespace infopatch {

ScaleFactor::ScaleFactor(int s) : value_(s) {
  if (s < 2 || s > 4) {
    throw_data_error("unsupported scale factor " + std::to_string(s) + " (supported: 2, 3, 4)");
  }
}

double keys_cubic(double x) noexcept {
  constexpr double a = -0.5;
  const double t = std::abs(x);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

Raster crop_to_multiple(const Raster& img, ScaleFactor s) {
  const int f = s.value();
  if (img.width() < f || img.height() < f) {
    throw_data_error("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                     " is smaller than scale factor " + std::to_string(f));
  }
  const int w = img.width() - img.width() % f;
  const int h = img.height() - img.height() % f;
  if (w == img.width() && h == img.height()) return img;
  return img.crop(0, 0, w, h);
}

namespace {

// Normalised taps for one output sample along one axis.
struct Taps {
  int first = 0;                // first source index before clamping
  std::vector<double> weights;  // consecutive source indices from `first`
};

std::vector<Taps> downscale_taps(int in_size, int factor) {
  const int out_size = in_size / factor;
  const double support = 2.0 * factor;
  std::vector<Taps> taps(static_cast<std::size_t>(out_size));
  for (int o = 0; o < out_size; ++o) {
    const double centre = (o + 0.5) * factor - 0.5;
    const int lo = static_cast<int>(std::ceil(centre - support));
    const int hi = static_cast<int>(std::floor(centre + support));
    Taps& t = taps[static_cast<std::size_t>(o)];
    t.first = lo;
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double w = keys_cubic((centre - j) / factor);
      t.weights.push_back(w);
      sum += w;
    }
    for (double& w : t.weights) w /= sum;
  }
  return taps;
}

}  // namespace

FloatRaster bicubic_downscale_real(const Raster& hr, ScaleFactor s) {
  const int f = s.value();
  if (hr.width() % f != 0 || hr.height() % f != 0) {
    throw_data_error("dimensions not divisible: " + std::to_string(hr.width()) + "x" +
                     std::to_string(hr.height()) + " by scale " + std::to_string(f));
  }
  const int in_w = hr.width();
  const int in_h = hr.height();
  const int out_w = in_w / f;
  const int out_h = in_h / f;
  const int c = hr.channels();
  const auto col_taps = downscale_taps(in_w, f);
  const auto row_taps = downscale_taps(in_h, f);

  // Horizontal pass: in_h x out_w x c.
  std::vector<double> tmp(static_cast<std::size_t>(in_h) * static_cast<std::size_t>(out_w) *
                          static_cast<std::size_t>(c));
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const Taps& t = col_taps[static_cast<std::size_t>(x)];
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.weights.size(); ++i) {
          const int src = std::clamp(t.first + static_cast<int>(i), 0, in_w - 1);
          acc += t.weights[i] * hr.at(y, src, ch);
        }
        tmp[(static_cast<std::size_t>(y) * static_cast<std::size_t>(out_w) +
             static_cast<std::size_t>(x)) * static_cast<std::size_t>(c) +
            static_cast<std::size_t>(ch)] = acc;
      }
    }
  }

  FloatRaster out(out_w, out_h, c);
  for (int y = 0; y < out_h; ++y) {
    const Taps& t = row_taps[static_cast<std::size_t>(y)];
    for (int x = 0; x < out_w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.weights.size(); ++i) {
          const int src = std::clamp(t.first + static_cast<int>(i), 0, in_h - 1);
          acc += t.weights[i] *
                 tmp[(static_cast<std::size_t>(src) * static_cast<std::size_t>(out_w) +
                      static_cast<std::size_t>(x)) * static_cast<std::size_t>(c) +
                     static_cast<std::size_t>(ch)];
        }
        out.at(y, x, ch) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Raster bicubic_downscale(const Raster& hr, ScaleFactor s) {
  return quantize(bicubic_downscale_real(hr, s));
}

FloatRaster bilinear_upscale(const Raster& lr, ScaleFactor s) {
  return bilinear_upscale(lr, s.value());
}

FloatRaster bilinear_upscale(const Raster& lr, int factor) {
  if (factor < 1) throw_data_error("bilinear_upscale: factor must be positive");
  const int in_w = lr.width();
  const int in_h = lr.height();
  const int out_w = in_w * factor;
  const int out_h = in_h * factor;
  const int c = lr.channels();

  struct Lerp {
    int i0;
    int i1;
    double t;
  };
  auto axis = [factor](int out_size, int in_size) {
    std::vector<Lerp> lerps(static_cast<std::size_t>(out_size));
    for (int o = 0; o < out_size; ++o) {
      const double pos = (o + 0.5) / factor - 0.5;
      const double base = std::floor(pos);
      const int i = static_cast<int>(base);
      lerps[static_cast<std::size_t>(o)] = {std::clamp(i, 0, in_size - 1),
                                            std::clamp(i + 1, 0, in_size - 1), pos - base};
    }
    return lerps;
  };
  const auto xs = axis(out_w, in_w);
  const auto ys = axis(out_h, in_h);

  FloatRaster out(out_w, out_h, c);
  const auto channels = static_cast<std::size_t>(c);
  std::vector<double> top(static_cast<std::size_t>(out_w) * channels);
  std::vector<double> bottom(top.size());
  auto horizontal = [&](int src_row, std::vector<double>& dst) {
    const std::uint8_t* src = lr.data().data() + static_cast<std::size_t>(src_row) * static_cast<std::size_t>(in_w) * channels;
    for (std::size_t x = 0; x < static_cast<std::size_t>(out_w); ++x) {
      const Lerp& l = xs[x];
      const std::uint8_t* p0 = src + static_cast<std::size_t>(l.i0) * channels;
      const std::uint8_t* p1 = src + static_cast<std::size_t>(l.i1) * channels;
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const double a = p0[ch];
        const double b = p1[ch];
        dst[x * channels + ch] = a + l.t * (b - a);
      }
    }
  };
  // Source rows advance monotonically, so each is interpolated horizontally once.
  int top_row = -1;
  int bottom_row = -1;
  for (int y = 0; y < out_h; ++y) {
    const Lerp& l = ys[static_cast<std::size_t>(y)];
    if (l.i0 != top_row) {
      if (l.i0 == bottom_row) {
        std::swap(top, bottom);
        std::swap(top_row, bottom_row);
      } else {
        horizontal(l.i0, top);
        top_row = l.i0;
      }
    }
    if (l.i1 != bottom_row) {
      horizontal(l.i1, bottom);
      bottom_row = l.i1;
    }
    float* row = &out.at(y, 0, 0);
    for (std::size_t i = 0; i < top.size(); ++i) {
      row[i] = static_cast<float>(top[i] + l.t * (bottom[i] - top[i]));
    }
  }
  return out;
}

}  // namespace infopatch
