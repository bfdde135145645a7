#include "infopatch/importance.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "infopatch/error.hpp"
#include "infopatch/integral.hpp"

namespace infopatch {

namespace {

constexpr std::array<std::string_view, 7> kMetricNames = {
    "psnr-bilinear", "std0", "std1", "std2", "sobel", "laplacian", "psnr-bilinear-y"};

constexpr double kPeakSquared = 255.0 * 255.0;

void check_anchor_fit(int width, int height, const PatchGeometry& g) {
  if (g.patch_size() > width || g.patch_size() > height) {
    throw_data_error("patch size " + std::to_string(g.patch_size()) + " exceeds image " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
}

void check_pair(const Raster& hr, const Raster& lr, const PatchGeometry& g, MetricKind metric) {
  if (!is_psnr_metric(metric)) {
    throw_data_error("metric " + std::string(to_string(metric)) + " is not a PSNR metric");
  }
  const int s = g.scale().value();
  if (lr.width() * s != hr.width() || lr.height() * s != hr.height()) {
    throw_data_error("dimension mismatch: HR " + std::to_string(hr.width()) + "x" +
                     std::to_string(hr.height()) + " is not " + std::to_string(s) + " x LR " +
                     std::to_string(lr.width()) + "x" + std::to_string(lr.height()));
  }
  if (lr.channels() != hr.channels()) {
    throw_data_error("channel mismatch between HR and LR");
  }
  check_anchor_fit(hr.width(), hr.height(), g);
}

// HR and bilinear SR as integers on the common 2^-16 grid, plus the channel
// count the MSE averages over.
struct FixedPair {
  FixedImage hr;
  FixedImage sr;
};

FixedImage align_shift(FixedImage img, int shift) {
  const int up = shift - img.shift;
  if (up > 0) {
    for (auto& v : img.data) v <<= up;
    img.shift = shift;
  }
  return img;
}

FixedPair fixed_pair(const Raster& hr, const Raster& lr, const PatchGeometry& g, MetricKind metric) {
  check_pair(hr, lr, g, metric);
  const FloatRaster sr = bilinear_upscale(lr, g.scale());
  if (metric == MetricKind::PsnrBilinearLuma && hr.channels() == 3) {
    return {to_fixed(rgb_to_luma(hr)), to_fixed(rgb_to_luma(sr))};
  }
  return {align_shift(to_fixed(hr), kFixedShift), to_fixed(sr)};
}

// Squared-error sum at scale 2^32 -> PSNR. Shared by both PSNR paths so equal
// integer sums give bitwise-equal scores.
float psnr_from_error_sum(Int128 error_sum, int channels, int k) {
  const double denom = 4294967296.0 * static_cast<double>(channels) * static_cast<double>(k) *
                       static_cast<double>(k);
  return static_cast<float>(mse_to_psnr(static_cast<double>(error_sum) / denom));
}

ImportanceMap empty_map(int width, int height, const PatchGeometry& g, MetricKind metric) {
  return ImportanceMap(g.anchor_rows(height), g.anchor_cols(width), g, metric);
}

std::int64_t fixed_sample(std::uint8_t value) noexcept { return value; }
std::int64_t fixed_sample(float value) noexcept { return to_fixed_sample(value); }

// Integral tables of the per-pixel channel sums HR*HR, HR*SR and SR*SR,
// built in one pass. SR enters at 2^16; HR keeps its own scale (1 for 8-bit
// samples, 2^16 for luma), bounded by `hr_peak`.
template <typename HhAcc, typename HsAcc>
struct PsnrTables {
  BasicIntegralImage<HhAcc> hh;
  BasicIntegralImage<HsAcc> hs;
  WideIntegralImage ss;
};

template <typename HhAcc, typename HsAcc, typename HrSample>
PsnrTables<HhAcc, HsAcc> psnr_tables(std::span<const HrSample> hr, std::span<const float> sr, int w, int h,
                                     int channels, std::int64_t hr_peak) {
  const std::int64_t sr_peak = to_fixed_sample(255.0f);
  const Int128 c = channels;
  typename BasicIntegralImage<HhAcc>::Builder hh(w, h, c * hr_peak * hr_peak, "hr*hr");
  typename BasicIntegralImage<HsAcc>::Builder hs(w, h, c * hr_peak * sr_peak, "hr*sr");
  WideIntegralImage::Builder ss(w, h, c * sr_peak * sr_peak, "sr*sr");

  const auto width = static_cast<std::size_t>(w);
  const auto ch = static_cast<std::size_t>(channels);
  std::vector<std::int64_t> hh_row(width), hs_row(width), ss_row(width);
  for (std::size_t i = 0; i < static_cast<std::size_t>(h); ++i) {
    const HrSample* a_row = hr.data() + i * width * ch;
    const float* b_row = sr.data() + i * width * ch;
    for (std::size_t j = 0; j < width; ++j) {
      std::int64_t aa = 0;
      std::int64_t ab = 0;
      std::int64_t bb = 0;
      for (std::size_t k = 0; k < ch; ++k) {
        const std::int64_t a = fixed_sample(a_row[j * ch + k]);
        const std::int64_t b = to_fixed_sample(b_row[j * ch + k]);
        aa += a * a;
        ab += a * b;
        bb += b * b;
      }
      hh_row[j] = aa;
      hs_row[j] = ab;
      ss_row[j] = bb;
    }
    hh.push_row(std::span<const std::int64_t>(hh_row));
    hs.push_row(std::span<const std::int64_t>(hs_row));
    ss.push_row(std::span<const std::int64_t>(ss_row));
  }
  return {std::move(hh).finish(), std::move(hs).finish(), std::move(ss).finish()};
}

// Window sums of the three tables combined at scale 2^32:
//   sum (hr - sr)^2 = HH * 2^(2 d) + SS - 2 * HS * 2^d,  d = 16 - hr_shift.
template <typename HhAcc, typename HsAcc>
ImportanceMap evaluate_psnr(const PsnrTables<HhAcc, HsAcc>& t, int channels, int hr_shift,
                            const PatchGeometry& g, MetricKind metric) {
  const int d = kFixedShift - hr_shift;
  ImportanceMap map = empty_map(t.ss.width(), t.ss.height(), g, metric);
  const int k = g.patch_size();
  for (int r = 0; r < map.rows(); ++r) {
    const int u = map.anchor_u(r);
    for (int c = 0; c < map.cols(); ++c) {
      const int v = map.anchor_v(c);
      const Int128 error_sum = (static_cast<Int128>(t.hh.rect_sum_unchecked(u, v, k, k)) << (2 * d)) +
                               t.ss.rect_sum_unchecked(u, v, k, k) -
                               (static_cast<Int128>(t.hs.rect_sum_unchecked(u, v, k, k)) << (d + 1));
      map.score(r, c) = psnr_from_error_sum(error_sum, channels, k);
    }
  }
  return map;
}

double pooled_std(Int128 sum, Int128 sum_sq, Int128 n, double unit) {
  const Int128 num = n * sum_sq - sum * sum;  // n^2 * variance, exact
  return std::sqrt(static_cast<double>(num)) / static_cast<double>(n) / unit;
}

// Luma as doubles (or the single channel of grayscale input).
std::vector<double> luma_plane(const Raster& hr) {
  std::vector<double> plane(hr.pixel_count());
  if (hr.channels() == 3) {
    const FloatRaster y = rgb_to_luma(hr);
    std::copy(y.data().begin(), y.data().end(), plane.begin());
  } else {
    std::copy(hr.data().begin(), hr.data().end(), plane.begin());
  }
  return plane;
}

template <typename Stencil>
std::vector<double> filter3x3(const Raster& hr, Stencil&& stencil) {
  const std::vector<double> y = luma_plane(hr);
  const int w = hr.width();
  const int h = hr.height();
  auto px = [&](int r, int c) {
    r = std::clamp(r, 0, h - 1);
    c = std::clamp(c, 0, w - 1);
    return y[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)];
  };
  std::vector<double> out(y.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      std::array<double, 9> n{};
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) n[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)] = px(r + dr, c + dc);
      }
      out[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)] = stencil(n);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(MetricKind metric) noexcept {
  return kMetricNames[static_cast<std::size_t>(metric)];
}

MetricKind parse_metric(std::string_view name) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == name) return static_cast<MetricKind>(i);
  }
  throw_data_error("unknown metric '" + std::string(name) +
                   "' (expected psnr-bilinear, psnr-bilinear-y, std0, std1, std2, sobel, laplacian)");
}

MetricKind metric_from_tag(std::uint8_t tag) {
  if (tag >= kMetricNames.size()) throw_data_error("unknown metric tag " + std::to_string(tag));
  return static_cast<MetricKind>(tag);
}

bool is_psnr_metric(MetricKind metric) noexcept {
  return metric == MetricKind::PsnrBilinear || metric == MetricKind::PsnrBilinearLuma;
}

bool higher_is_more_informative(MetricKind metric) noexcept { return !is_psnr_metric(metric); }

PatchGeometry::PatchGeometry(int patch_size, ScaleFactor scale, std::optional<int> stride)
    : patch_size_(patch_size), scale_(scale), stride_(stride.value_or(scale.value())) {
  if (patch_size_ < 1) throw_data_error("patch size must be positive");
  if (patch_size_ % scale_.value() != 0) {
    throw_data_error("patch size " + std::to_string(patch_size_) + " is not divisible by scale " +
                     std::to_string(scale_.value()));
  }
  if (stride_ < 1) throw_data_error("stride must be at least 1");
}

int PatchGeometry::anchor_rows(int image_height) const noexcept {
  return image_height < patch_size_ ? 0 : (image_height - patch_size_) / stride_ + 1;
}

int PatchGeometry::anchor_cols(int image_width) const noexcept {
  return image_width < patch_size_ ? 0 : (image_width - patch_size_) / stride_ + 1;
}

ImportanceMap::ImportanceMap(int rows, int cols, PatchGeometry geometry, MetricKind metric)
    : ImportanceMap(rows, cols, geometry, metric,
                    std::vector<float>(static_cast<std::size_t>(std::max(rows, 0)) *
                                       static_cast<std::size_t>(std::max(cols, 0)))) {}

ImportanceMap::ImportanceMap(int rows, int cols, PatchGeometry geometry, MetricKind metric,
                             std::vector<float> scores)
    : rows_(rows), cols_(cols), geometry_(geometry), metric_(metric), scores_(std::move(scores)) {
  if (rows < 1 || cols < 1) throw_data_error("importance map needs at least one anchor");
  if (scores_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw_data_error("importance map score count does not match grid");
  }
  for (const float s : scores_) {
    if (std::isnan(s) || s == -std::numeric_limits<float>::infinity() ||
        (s == kPerfectScore && !is_psnr_metric(metric))) {
      throw_data_error("importance map holds a non-finite score");
    }
  }
}

bool identical_scores(const ImportanceMap& a, const ImportanceMap& b) noexcept {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const auto sa = a.scores();
  const auto sb = b.scores();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(sa[i]) != std::bit_cast<std::uint32_t>(sb[i])) return false;
  }
  return true;
}

double patch_mse(std::span<const float> sr, std::span<const std::uint8_t> hr) {
  if (sr.size() != hr.size() || sr.empty()) {
    throw_data_error("patch_mse: shape mismatch (" + std::to_string(sr.size()) + " vs " +
                     std::to_string(hr.size()) + " samples)");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sr.size(); ++i) {
    const double d = static_cast<double>(sr[i]) - static_cast<double>(hr[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(sr.size());
}

double mse_to_psnr(double mse) {
  if (!(mse >= 0.0)) throw_data_error("mse_to_psnr: negative or NaN mse");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeakSquared / mse);
}

ImportanceMap score_map_fast(const Raster& hr, const Raster& lr, const PatchGeometry& g,
                             MetricKind metric) {
  check_pair(hr, lr, g, metric);
  const FloatRaster sr = bilinear_upscale(lr, g.scale());
  const int w = hr.width();
  const int h = hr.height();
  if (metric == MetricKind::PsnrBilinearLuma && hr.channels() == 3) {
    const FloatRaster hr_y = rgb_to_luma(hr);
    const FloatRaster sr_y = rgb_to_luma(sr);
    const auto tables = psnr_tables<Int128, Int128>(hr_y.data(), sr_y.data(), w, h, 1, to_fixed_sample(255.0f));
    return evaluate_psnr(tables, 1, kFixedShift, g, metric);
  }
  const auto tables = psnr_tables<std::int64_t, std::int64_t>(hr.data(), sr.data(), w, h, hr.channels(), 255);
  return evaluate_psnr(tables, hr.channels(), 0, g, metric);
}

ImportanceMap score_map_naive(const Raster& hr, const Raster& lr, const PatchGeometry& g,
                              MetricKind metric) {
  const FixedPair pair = fixed_pair(hr, lr, g, metric);
  const int w = pair.hr.width;
  const auto row_stride = static_cast<std::size_t>(w) * static_cast<std::size_t>(pair.hr.channels);
  const auto channels = static_cast<std::size_t>(pair.hr.channels);

  ImportanceMap map = empty_map(w, pair.hr.height, g, metric);
  const int k = g.patch_size();
  const std::size_t span = static_cast<std::size_t>(k) * channels;
  // Each squared difference is below 2^48, so int64 partials hold 2^15 terms.
  constexpr std::size_t kChunk = std::size_t{1} << 15;
  for (int r = 0; r < map.rows(); ++r) {
    const auto u = static_cast<std::size_t>(map.anchor_u(r));
    for (int c = 0; c < map.cols(); ++c) {
      const std::size_t offset = static_cast<std::size_t>(map.anchor_v(c)) * channels;
      Int128 total = 0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
        const std::int64_t* a = pair.hr.data.data() + (u + i) * row_stride + offset;
        const std::int64_t* b = pair.sr.data.data() + (u + i) * row_stride + offset;
        for (std::size_t j0 = 0; j0 < span; j0 += kChunk) {
          const std::size_t j1 = std::min(span, j0 + kChunk);
          std::int64_t partial = 0;
          for (std::size_t j = j0; j < j1; ++j) {
            const std::int64_t d = a[j] - b[j];
            partial += d * d;
          }
          total += partial;
        }
      }
      map.score(r, c) = psnr_from_error_sum(total, pair.hr.channels, k);
    }
  }
  return map;
}

ImportanceMap score_map_alternative(const Raster& hr, MetricKind metric, const PatchGeometry& g) {
  if (is_psnr_metric(metric)) {
    throw_data_error("score_map_alternative: PSNR metrics need an LR image");
  }
  check_anchor_fit(hr.width(), hr.height(), g);
  const int w = hr.width();
  const int h = hr.height();
  const int k = g.patch_size();
  const auto pixels = hr.pixel_count();
  const auto channels = static_cast<std::size_t>(hr.channels());
  ImportanceMap map = empty_map(w, h, g, metric);

  auto for_each_anchor = [&](auto&& score_at) {
    for (int r = 0; r < map.rows(); ++r) {
      for (int c = 0; c < map.cols(); ++c) {
        map.score(r, c) = static_cast<float>(score_at(map.anchor_u(r), map.anchor_v(c)));
      }
    }
  };

  switch (metric) {
    case MetricKind::Std0: {
      std::vector<std::int64_t> sum(pixels), sq(pixels);
      const auto data = hr.data();
      for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < channels; ++c) {
          const std::int64_t x = data[p * channels + c];
          sum[p] += x;
          sq[p] += x * x;
        }
      }
      const WideIntegralImage s1(std::span<const std::int64_t>(sum), w, h, "sum_c x");
      const WideIntegralImage s2(std::span<const std::int64_t>(sq), w, h, "sum_c x^2");
      const Int128 n = static_cast<Int128>(channels) * k * k;
      for_each_anchor([&](int u, int v) {
        return pooled_std(s1.rect_sum_unchecked(u, v, k, k), s2.rect_sum_unchecked(u, v, k, k), n, 1.0);
      });
      break;
    }
    case MetricKind::Std1: {
      std::vector<WideIntegralImage> s1, s2;
      const auto data = hr.data();
      for (std::size_t c = 0; c < channels; ++c) {
        std::vector<std::int64_t> x(pixels), xx(pixels);
        for (std::size_t p = 0; p < pixels; ++p) {
          x[p] = data[p * channels + c];
          xx[p] = x[p] * x[p];
        }
        s1.emplace_back(std::span<const std::int64_t>(x), w, h, "x[c]");
        s2.emplace_back(std::span<const std::int64_t>(xx), w, h, "x[c]^2");
      }
      const Int128 n = static_cast<Int128>(k) * k;
      for_each_anchor([&](int u, int v) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          acc += pooled_std(s1[c].rect_sum_unchecked(u, v, k, k), s2[c].rect_sum_unchecked(u, v, k, k), n, 1.0);
        }
        return acc / static_cast<double>(channels);
      });
      break;
    }
    case MetricKind::Std2: {
      const FixedImage y = hr.channels() == 3 ? to_fixed(rgb_to_luma(hr)) : to_fixed(hr);
      std::vector<std::int64_t> sq(pixels);
      for (std::size_t p = 0; p < pixels; ++p) sq[p] = y.data[p] * y.data[p];
      const WideIntegralImage s1(std::span<const std::int64_t>(y.data), w, h, "y");
      const WideIntegralImage s2(std::span<const std::int64_t>(sq), w, h, "y^2");
      const Int128 n = static_cast<Int128>(k) * k;
      const double unit = std::ldexp(1.0, y.shift);
      for_each_anchor([&](int u, int v) {
        return pooled_std(s1.rect_sum_unchecked(u, v, k, k), s2.rect_sum_unchecked(u, v, k, k), n, unit);
      });
      break;
    }
    case MetricKind::Sobel:
    case MetricKind::Laplacian: {
      const std::vector<double> response =
          metric == MetricKind::Sobel ? sobel_magnitude(hr) : laplacian_magnitude(hr);
      const RealIntegralImage table(std::span<const double>(response), w, h, to_string(metric).data());
      const double area = static_cast<double>(k) * static_cast<double>(k);
      for_each_anchor([&](int u, int v) { return std::max(0.0, table.rect_sum_unchecked(u, v, k, k) / area); });
      break;
    }
    default:
      break;
  }
  return map;
}

ImportanceMap score_map(const Raster& hr, const Raster& lr, const PatchGeometry& g, MetricKind metric) {
  if (is_psnr_metric(metric)) return score_map_fast(hr, lr, g, metric);
  return score_map_alternative(hr, metric, g);
}

std::vector<double> sobel_magnitude(const Raster& hr) {
  return filter3x3(hr, [](const std::array<double, 9>& n) {
    const double gx = (n[2] + 2.0 * n[5] + n[8]) - (n[0] + 2.0 * n[3] + n[6]);
    const double gy = (n[6] + 2.0 * n[7] + n[8]) - (n[0] + 2.0 * n[1] + n[2]);
    return std::hypot(gx, gy);
  });
}

std::vector<double> laplacian_magnitude(const Raster& hr) {
  return filter3x3(hr, [](const std::array<double, 9>& n) {
    return std::abs(n[1] + n[3] + n[5] + n[7] - 4.0 * n[4]);
  });
}

}  // namespace infopatch
