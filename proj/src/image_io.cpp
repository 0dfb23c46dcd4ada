// SPDX-License-Identifier: MIT

#include "sixdof/image_io.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "sixdof/error.h"

namespace sixdof {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return f;
}

[[noreturn]] void png_fail(png_structp, png_const_charp message) {
  throw Error(ErrorCode::kParseError, std::string("png: ") + message);
}

void png_warn(png_structp, png_const_charp) {}

void write_png(const std::filesystem::path& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_bytep>& rows) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

struct PngData {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;
  std::size_t row_bytes = 0;
};

PngData read_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  PngData out;
  try {
    png_init_io(png, f.get());
    png_read_info(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    out.color_type = png_get_color_type(png, info);
    if (out.bit_depth == 16) png_set_swap(png);
    if (out.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (out.bit_depth < 8) png_set_expand(png);
    png_read_update_info(png, info);
    out.color_type = png_get_color_type(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    out.row_bytes = png_get_rowbytes(png, info);
    out.bytes.resize(out.row_bytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + y * out.row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_depth_png(const std::filesystem::path& path, const DepthImage& depth) {
  std::vector<std::uint16_t> buf(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const float d = depth.data()[i];
    buf[i] = d > 0.0f ? static_cast<std::uint16_t>(std::min(65535.0f, std::round(d))) : 0;
  }
  std::vector<png_bytep> rows(depth.height());
  for (int y = 0; y < depth.height(); ++y) {
    rows[y] = reinterpret_cast<png_bytep>(buf.data() + static_cast<std::size_t>(y) * depth.width());
  }
  write_png(path, depth.width(), depth.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

DepthImage read_depth_png(const std::filesystem::path& path) {
  const PngData p = read_png(path);
  if (p.color_type != PNG_COLOR_TYPE_GRAY || p.bit_depth != 16) {
    throw Error(ErrorCode::kParseError,
                path.string() + " is not a 16-bit grayscale depth image");
  }
  DepthImage depth(p.width, p.height, 0.0f);
  for (int y = 0; y < p.height; ++y) {
    const auto* row = reinterpret_cast<const std::uint16_t*>(p.bytes.data() + y * p.row_bytes);
    for (int x = 0; x < p.width; ++x) depth.at(x, y) = static_cast<float>(row[x]);
  }
  return depth;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& rgb) {
  if (rgb.data.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3) {
    throw Error(ErrorCode::kInvalidArgument, "rgb buffer size mismatch");
  }
  std::vector<png_bytep> rows(rgb.height);
  for (int y = 0; y < rgb.height; ++y) {
    rows[y] = const_cast<png_bytep>(rgb.data.data() + static_cast<std::size_t>(y) * rgb.width * 3);
  }
  write_png(path, rgb.width, rgb.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const PngData p = read_png(path);
  if (p.color_type != PNG_COLOR_TYPE_RGB || p.bit_depth != 8) {
    throw Error(ErrorCode::kParseError, path.string() + " is not an 8-bit RGB image");
  }
  RgbImage rgb{p.width, p.height, {}};
  rgb.data.resize(static_cast<std::size_t>(p.width) * p.height * 3);
  for (int y = 0; y < p.height; ++y) {
    std::copy_n(p.bytes.data() + y * p.row_bytes, p.width * 3,
                rgb.data.data() + static_cast<std::size_t>(y) * p.width * 3);
  }
  return rgb;
}

}  // namespace sixdof
