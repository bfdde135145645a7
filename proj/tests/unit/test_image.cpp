#include <gtest/gtest.h>
#include <png.h>

#include <cstring>
#include <random>
#include <vector>

#include "infopatch/error.hpp"
#include "infopatch/image.hpp"
#include "infopatch/png_io.hpp"
#include "test_support.hpp"

namespace infopatch {
namespace {

using testing::TempDir;

// Writes a PNG through libpng's simplified API so unsupported layouts can be
// produced without going through save_image.
void write_png_with_format(const std::filesystem::path& path, int width, int height, png_uint_32 format,
                           const void* pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  ASSERT_NE(png_image_write_to_file(&image, path.c_str(), 0, pixels, 0, nullptr), 0);
}

TEST(Raster, RejectsDataLengthMismatch) {
  EXPECT_THROW(Raster(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
  EXPECT_THROW(Raster(2, 2, 4), Error);
  EXPECT_THROW(Raster(0, 2, 1), Error);
}

TEST(Raster, CropCopiesSubImage) {
  Raster r(3, 2, 1, {1, 2, 3, 4, 5, 6});
  const Raster c = r.crop(1, 1, 2, 1);
  EXPECT_EQ(c, Raster(2, 1, 1, {5, 6}));
  EXPECT_THROW(r.crop(1, 2, 2, 1), Error);
}

TEST(PngIo, SingleWhitePixel) {
  TempDir dir;
  const std::uint8_t white[3] = {255, 255, 255};
  write_png_with_format(dir / "white.png", 1, 1, PNG_FORMAT_RGB, white);
  EXPECT_EQ(load_image(dir / "white.png"), Raster(1, 1, 3, {255, 255, 255}));
}

TEST(PngIo, GrayRoundTrip) {
  TempDir dir;
  const Raster r(2, 2, 1, {0, 64, 128, 255});
  save_image(r, dir / "g.png");
  EXPECT_EQ(load_image(dir / "g.png"), r);
}

TEST(PngIo, RoundTripIsBitExactForRandomRasters) {
  TempDir dir;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 40);
  for (int trial = 0; trial < 30; ++trial) {
    const int channels = trial % 2 == 0 ? 1 : 3;
    const Raster r = testing::random_raster(rng, dim(rng), dim(rng), channels);
    save_image(r, dir / "r.png");
    ASSERT_EQ(load_image(dir / "r.png"), r) << "trial " << trial;
  }
}

TEST(PngIo, RejectsSixteenBitDepth) {
  TempDir dir;
  const std::uint16_t samples[4] = {0, 1000, 30000, 65535};
  write_png_with_format(dir / "deep.png", 2, 2, PNG_FORMAT_LINEAR_Y, samples);
  try {
    load_image(dir / "deep.png");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
    EXPECT_NE(std::string(e.what()).find("unsupported bit depth 16"), std::string::npos) << e.what();
  }
}

TEST(PngIo, RejectsAlpha) {
  TempDir dir;
  const std::uint8_t rgba[4] = {1, 2, 3, 4};
  write_png_with_format(dir / "alpha.png", 1, 1, PNG_FORMAT_RGBA, rgba);
  try {
    load_image(dir / "alpha.png");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("rgb+alpha"), std::string::npos) << e.what();
  }
}

TEST(PngIo, MissingFileIsIoError) {
  try {
    load_image("/nonexistent/infopatch.png");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(PngIo, NonPngIsDataError) {
  TempDir dir;
  std::ofstream(dir / "x.png") << "definitely not a png";
  try {
    load_image(dir / "x.png");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(PngIo, FloatRasterIsClampedAndRounded) {
  TempDir dir;
  FloatRaster f(4, 1, 1);
  f.at(0, 0) = 254.5f;
  f.at(0, 1) = -3.2f;
  f.at(0, 2) = 0.5f;
  f.at(0, 3) = 1000.0f;
  save_image(f, dir / "f.png");
  EXPECT_EQ(load_image(dir / "f.png"), Raster(4, 1, 1, {255, 0, 1, 255}));
}

TEST(Luma, ReferenceColours) {
  const FloatRaster y = rgb_to_luma(Raster(3, 1, 3, {255, 255, 255, 0, 0, 0, 255, 0, 0}));
  ASSERT_EQ(y.channels(), 1);
  EXPECT_NEAR(y.at(0, 0), 235.0, 1e-4);
  EXPECT_NEAR(y.at(0, 1), 16.0, 1e-4);
  EXPECT_NEAR(y.at(0, 2), 81.481, 1e-4);
}

TEST(Luma, RequiresThreeChannels) { EXPECT_THROW(rgb_to_luma(Raster(2, 2, 1)), Error); }

TEST(Luma, StaysInStudioRange) {
  std::mt19937_64 rng(11);
  const Raster r = testing::random_raster(rng, 64, 64, 3);
  const FloatRaster luma = rgb_to_luma(r);
  for (const float v : luma.data()) {
    ASSERT_GE(v, 16.0f);
    ASSERT_LE(v, 235.0f);
  }
  // Extremes of every channel combination.
  for (int mask = 0; mask < 8; ++mask) {
    const Raster px(1, 1, 3,
                    {static_cast<std::uint8_t>(mask & 1 ? 255 : 0), static_cast<std::uint8_t>(mask & 2 ? 255 : 0),
                     static_cast<std::uint8_t>(mask & 4 ? 255 : 0)});
    const float v = rgb_to_luma(px).at(0, 0);
    EXPECT_GE(v, 16.0f);
    EXPECT_LE(v, 235.0f);
  }
}

}  // namespace
}  // namespace infopatch
