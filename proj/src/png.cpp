#include "poachgrid/png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <string>

#include "poachgrid/error.hpp"

namespace poachgrid {
namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_nothing(png_structp) {}

}  // namespace

std::array<std::uint8_t, 3> risk_color(double value) {
  const double v = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
  const int step = static_cast<int>(std::lround(v * 255.0));
  auto lerp = [](int a, int b, double t) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * t));
  };
  const double t = step / 255.0;
  if (t <= 0.5) {
    const double s = t * 2.0;
    return {lerp(0, 255, s), lerp(0, 255, s), lerp(255, 0, s)};
  }
  const double s = (t - 0.5) * 2.0;
  return {255, lerp(255, 0, s), 0};
}

std::vector<std::uint8_t> encode_risk_png(const RasterDataset& risk) {
  risk.validate();
  const auto w = static_cast<std::size_t>(risk.width);
  const auto h = static_cast<std::size_t>(risk.height);
  std::vector<std::uint8_t> pixels(w * h * 4, 0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double v = risk.at(static_cast<int>(r), static_cast<int>(c));
      if (risk.is_nodata(v)) continue;  // transparent black
      const auto rgb = risk_color(v);
      std::uint8_t* px = &pixels[(r * w + c) * 4];
      px[0] = rgb[0];
      px[1] = rgb[1];
      px[2] = rgb[2];
      px[3] = 255;
    }
  }
  std::vector<png_bytep> rows(h);
  for (std::size_t r = 0; r < h; ++r) rows[r] = &pixels[r * w * 4];

  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw internal_error("libpng failed to allocate a writer");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw internal_error("libpng failed to encode the risk map");
  }
  png_set_write_fn(png, &out, append_bytes, flush_nothing);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace poachgrid
