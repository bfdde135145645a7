#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "infopatch/error.hpp"
#include "infopatch/integral.hpp"
#include "test_support.hpp"

namespace infopatch {
namespace {

std::vector<std::int64_t> random_plane(std::mt19937_64& rng, int w, int h, int max_value) {
  std::uniform_int_distribution<int> dist(0, max_value);
  std::vector<std::int64_t> plane(static_cast<std::size_t>(w * h));
  for (auto& v : plane) v = dist(rng);
  return plane;
}

std::int64_t naive_rect(const std::vector<std::int64_t>& plane, int w, int r0, int c0, int r1, int c1) {
  std::int64_t sum = 0;
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c) sum += plane[static_cast<std::size_t>(r * w + c)];
  return sum;
}

TEST(IntegralImage, AllOnesTwoByTwo) {
  const std::vector<std::int64_t> ones(4, 1);
  const IntegralImage ii(std::span<const std::int64_t>(ones), 2, 2);
  const std::int64_t expected[3][3] = {{0, 0, 0}, {0, 1, 2}, {0, 2, 4}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(ii.at(i, j), expected[i][j]) << i << "," << j;
}

TEST(IntegralImage, EveryCellMatchesNaivePrefixSum) {
  std::mt19937_64 rng(5);
  const auto plane = random_plane(rng, 16, 16, 255);
  const IntegralImage ii(std::span<const std::int64_t>(plane), 16, 16);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) ASSERT_EQ(ii.at(i, j), naive_rect(plane, 16, 0, 0, i, j));
  EXPECT_EQ(ii.total(), naive_rect(plane, 16, 0, 0, 16, 16));
}

TEST(IntegralImage, NonSquareTotal) {
  std::mt19937_64 rng(6);
  const auto plane = random_plane(rng, 13, 7, 65025);
  const IntegralImage ii(std::span<const std::int64_t>(plane), 13, 7);
  EXPECT_EQ(ii.total(), naive_rect(plane, 13, 0, 0, 7, 13));
}

TEST(WindowSum, AllOnesWindow) {
  const std::vector<std::int64_t> ones(20 * 12, 1);
  const IntegralImage ii(std::span<const std::int64_t>(ones), 20, 12);
  for (int u = 0; u + 8 <= 12; ++u)
    for (int v = 0; v + 8 <= 20; ++v) ASSERT_EQ(ii.window_sum(u, v, 8), 64);
}

TEST(WindowSum, FullImageWindowIsTotal) {
  std::mt19937_64 rng(8);
  const auto plane = random_plane(rng, 9, 9, 255);
  const IntegralImage ii(std::span<const std::int64_t>(plane), 9, 9);
  EXPECT_EQ(ii.window_sum(0, 0, 9), ii.total());
}

TEST(WindowSum, RandomPlaneAllAnchors) {
  std::mt19937_64 rng(9);
  const auto plane = random_plane(rng, 32, 32, 255);
  const IntegralImage ii(std::span<const std::int64_t>(plane), 32, 32);
  for (int u = 0; u + 5 <= 32; ++u)
    for (int v = 0; v + 5 <= 32; ++v) ASSERT_EQ(ii.window_sum(u, v, 5), naive_rect(plane, 32, u, v, u + 5, v + 5));
}

TEST(WindowSum, OutOfBoundsThrows) {
  const std::vector<std::int64_t> ones(16, 1);
  const IntegralImage ii(std::span<const std::int64_t>(ones), 4, 4);
  EXPECT_THROW(ii.window_sum(1, 0, 4), Error);
  EXPECT_THROW(ii.window_sum(0, -1, 2), Error);
  EXPECT_THROW(ii.window_sum(0, 0, 0), Error);
  EXPECT_NO_THROW(ii.window_sum(0, 0, 4));
}

// Exactness property over random 8-bit products, every anchor and every k.
TEST(WindowSum, ExactForEveryAnchorAndSize) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> dim(1, 64);
  for (int trial = 0; trial < 12; ++trial) {
    const int w = dim(rng);
    const int h = dim(rng);
    const Raster a = testing::random_raster(rng, w, h, 1);
    const ProductPlanes sq = product_planes(a, a);
    const auto& plane = sq.planes[0];
    const IntegralImage ii(std::span<const std::int64_t>(plane), w, h);
    for (int k = 1; k <= std::min(w, h); k += 1 + trial % 3) {
      for (int u = 0; u + k <= h; u += 1 + k / 4)
        for (int v = 0; v + k <= w; v += 1 + k / 4)
          ASSERT_EQ(ii.window_sum(u, v, k), naive_rect(plane, w, u, v, u + k, v + k));
    }
  }
}

TEST(IntegralImage, AccumulatorBoundIsEnforced) {
  const std::vector<std::int64_t> huge(4, std::numeric_limits<std::int64_t>::max() / 2);
  EXPECT_THROW(IntegralImage(std::span<const std::int64_t>(huge), 2, 2), Error);
  EXPECT_NO_THROW(WideIntegralImage(std::span<const std::int64_t>(huge), 2, 2));
}

TEST(IntegralImage, RealValuedSource) {
  const std::vector<double> plane = {0.5, 1.25, 2.0, 4.0};
  const RealIntegralImage ii(std::span<const double>(plane), 2, 2);
  EXPECT_DOUBLE_EQ(ii.total(), 7.75);
  EXPECT_DOUBLE_EQ(ii.window_sum(1, 1, 1), 4.0);
}

TEST(ProductPlanes, SaturatedSquares) {
  const Raster a = testing::constant_raster(3, 2, 3, 255);
  const ProductPlanes p = product_planes(a, a);
  EXPECT_EQ(p.shift, 0);
  ASSERT_EQ(p.planes.size(), 3u);
  for (const auto& plane : p.planes)
    for (const auto v : plane) ASSERT_EQ(v, 65025);
}

TEST(ProductPlanes, ZeroIsAbsorbing) {
  std::mt19937_64 rng(12);
  const ProductPlanes p = product_planes(Raster(4, 4, 1), testing::random_raster(rng, 4, 4, 1));
  for (const auto v : p.planes[0]) ASSERT_EQ(v, 0);
}

TEST(ProductPlanes, MatchesPerPixelMultiplication) {
  std::mt19937_64 rng(13);
  const Raster a = testing::random_raster(rng, 7, 5, 3);
  const Raster b = testing::random_raster(rng, 7, 5, 3);
  const ProductPlanes p = product_planes(a, b);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x)
      for (int c = 0; c < 3; ++c)
        ASSERT_EQ(p.planes[static_cast<std::size_t>(c)][static_cast<std::size_t>(y * 7 + x)],
                  a.at(y, x, c) * b.at(y, x, c));
}

TEST(ProductPlanes, RealOperandUsesFixedPoint) {
  FloatRaster sr(2, 1, 1);
  sr.at(0, 0) = 1.5f;
  sr.at(0, 1) = 0.25f;
  const ProductPlanes p = product_planes(Raster(2, 1, 1, {10, 4}), sr);
  EXPECT_EQ(p.shift, kFixedShift);
  EXPECT_EQ(p.planes[0][0], 15ll << kFixedShift);
  EXPECT_EQ(p.planes[0][1], 1ll << kFixedShift);
}

TEST(ProductPlanes, ShapeMismatchThrows) {
  EXPECT_THROW(product_planes(Raster(2, 2, 1), Raster(2, 3, 1)), Error);
  EXPECT_THROW(product_planes(Raster(2, 2, 1), Raster(2, 2, 3)), Error);
}

TEST(BuildIntegral, OneTablePerChannel) {
  std::mt19937_64 rng(14);
  const Raster a = testing::random_raster(rng, 6, 4, 3);
  const auto tables = build_integral(product_planes(a, a));
  ASSERT_EQ(tables.size(), 3u);
  for (int c = 0; c < 3; ++c) {
    std::int64_t sum = 0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) sum += a.at(y, x, c) * a.at(y, x, c);
    EXPECT_EQ(tables[static_cast<std::size_t>(c)].total(), sum);
  }
}

TEST(IntegralBuilder, MatchesPlaneConstructor) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<std::int64_t> dist(-1000, 1000);
  std::vector<std::int64_t> plane(9 * 7);
  for (auto& v : plane) v = dist(rng);
  IntegralImage::Builder builder(9, 7, 1000);
  for (std::size_t i = 0; i < 7; ++i) builder.push_row(std::span<const std::int64_t>(plane).subspan(i * 9, 9));
  const IntegralImage built = std::move(builder).finish();
  const IntegralImage direct(std::span<const std::int64_t>(plane), 9, 7);
  for (int r = 0; r <= 7; ++r)
    for (int c = 0; c <= 9; ++c) ASSERT_EQ(built.at(r, c), direct.at(r, c));
}

TEST(IntegralBuilder, EnforcesShapeAndBound) {
  const std::vector<std::int64_t> row = {1, 2, 3};
  IntegralImage::Builder short_rows(3, 2, 10);
  short_rows.push_row(std::span<const std::int64_t>(row));
  EXPECT_THROW(std::move(short_rows).finish(), Error);

  IntegralImage::Builder narrow(4, 1, 10);
  EXPECT_THROW(narrow.push_row(std::span<const std::int64_t>(row)), Error);

  IntegralImage::Builder tight(3, 1, 2);
  EXPECT_THROW(tight.push_row(std::span<const std::int64_t>(row)), Error);

  EXPECT_THROW(IntegralImage::Builder(1 << 15, 1 << 15, std::int64_t{1} << 40), Error);
}

}  // namespace
}  // namespace infopatch
