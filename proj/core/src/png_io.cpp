#include "infopatch/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "infopatch/error.hpp"

namespace infopatch {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports fatal errors through longjmp; keep the message for the throw.
struct PngErrorState {
  std::jmp_buf jump;
  std::string message;
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  state->message = msg ? msg : "unknown libpng error";
  std::longjmp(state->jump, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

std::string color_type_name(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return "gray";
    case PNG_COLOR_TYPE_RGB: return "rgb";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "gray+alpha";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "rgb+alpha";
    default: return "type " + std::to_string(color_type);
  }
}

}  // namespace

Raster load_image(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw_io_error("cannot open " + path.string());

  unsigned char signature[8];
  if (std::fread(signature, 1, sizeof signature, file.get()) != sizeof signature ||
      png_sig_cmp(signature, 0, sizeof signature) != 0) {
    throw_data_error(path.string() + ": not a PNG file");
  }

  PngErrorState state;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, on_png_error,
                                           on_png_warning);
  if (!png) throw_io_error("libpng: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw_io_error("libpng: cannot allocate info struct");
  }

  // Everything that must survive a longjmp lives outside this scope or is POD.
  volatile int width = 0;
  volatile int height = 0;
  volatile int channels = 0;
  volatile int bit_depth = 0;
  volatile int color_type = 0;
  std::vector<std::uint8_t> data;
  std::vector<png_bytep> rows;
  enum class Failure { None, Libpng, Depth, Color };
  volatile Failure failure = Failure::None;

  if (setjmp(state.jump)) {
    failure = Failure::Libpng;
  } else {
    png_init_io(png, file.get());
    png_set_sig_bytes(png, sizeof signature);
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    if (bit_depth != 8) {
      failure = Failure::Depth;
    } else if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
      failure = Failure::Color;
    } else {
      channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
      const auto row_bytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
      const auto row_count = static_cast<std::size_t>(height);
      data.resize(row_bytes * row_count);
      rows.resize(row_count);
      for (std::size_t r = 0; r < row_count; ++r) rows[r] = data.data() + row_bytes * r;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);

  switch (failure) {
    case Failure::Libpng:
      throw_data_error(path.string() + ": corrupt PNG (" + state.message + ")");
    case Failure::Depth:
      throw_data_error(path.string() + ": unsupported bit depth " + std::to_string(bit_depth) +
                       " (only 8-bit PNG is supported)");
    case Failure::Color:
      throw_data_error(path.string() + ": unsupported color type " + color_type_name(color_type) +
                       " (only 8-bit gray or rgb without alpha is supported)");
    case Failure::None:
      break;
  }
  return Raster(width, height, channels, std::move(data));
}

void save_image(const Raster& raster, const std::filesystem::path& path) {
  if (raster.empty()) throw_data_error("save_image: empty raster");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw_io_error("cannot write " + path.string());

  PngErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, on_png_error,
                                            on_png_warning);
  if (!png) throw_io_error("libpng: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw_io_error("libpng: cannot allocate info struct");
  }

  const std::size_t row_bytes =
      static_cast<std::size_t>(raster.width()) * static_cast<std::size_t>(raster.channels());
  std::vector<png_bytep> rows(static_cast<std::size_t>(raster.height()));
  // libpng takes non-const row pointers but does not modify them when writing.
  auto* base = const_cast<std::uint8_t*>(raster.data().data());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = base + r * row_bytes;

  volatile bool failed = false;
  if (setjmp(state.jump)) {
    failed = true;
  } else {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(raster.width()),
                 static_cast<png_uint_32>(raster.height()), 8,
                 raster.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  if (failed) throw_io_error(path.string() + ": PNG write failed (" + state.message + ")");
  if (std::fflush(file.get()) != 0) throw_io_error(path.string() + ": write failed");
}

void save_image(const FloatRaster& raster, const std::filesystem::path& path) {
  save_image(quantize(raster), path);
}

}  // namespace infopatch
