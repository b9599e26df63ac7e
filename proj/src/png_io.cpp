/*
 * Copyright 2026 The Densify Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "densify/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

namespace densify {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; the message is stashed here and
// rethrown as PngError once control is back in C++ frames.
struct ErrorState {
  std::string message;
};

void OnPngError(png_structp png, png_const_charp message) {
  auto* state = static_cast<ErrorState*>(png_get_error_ptr(png));
  if (state != nullptr) state->message = message;
  longjmp(png_jmpbuf(png), 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

}  // namespace

PngImage ReadPng(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    throw PngError(path.string() + ": cannot open");
  }
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 ||
      png_sig_cmp(signature, 0, 8) != 0) {
    throw PngError(path.string() + ": not a PNG file");
  }

  ErrorState state;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state,
                                           OnPngError, OnPngWarning);
  if (png == nullptr) throw PngError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw PngError("png_create_info_struct failed");
  }

  PngImage image;
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PngError(path.string() + ": malformed PNG: " + state.message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  png_read_update_info(png, info);

  image.width = static_cast<int>(png_get_image_width(png, info));
  image.height = static_cast<int>(png_get_image_height(png, info));
  image.bit_depth = png_get_bit_depth(png, info);
  image.channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * image.height);
  rows.resize(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = buffer.data() + row_bytes * r;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count =
      static_cast<std::size_t>(image.width) * image.height * image.channels;
  image.samples.resize(count);
  if (image.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      // Native little-endian after png_set_swap.
      image.samples[i] =
          static_cast<std::uint16_t>(buffer[2 * i] | (buffer[2 * i + 1] << 8));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) image.samples[i] = buffer[i];
  }
  return image;
}

void WritePng(const std::filesystem::path& path, const PngImage& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) {
    throw PngError("WritePng: bit depth must be 8 or 16");
  }
  if (image.channels != 1 && image.channels != 3) {
    throw PngError("WritePng: channels must be 1 or 3");
  }
  const std::size_t per_row =
      static_cast<std::size_t>(image.width) * image.channels;
  if (image.width <= 0 || image.height <= 0 ||
      image.samples.size() != per_row * image.height) {
    throw PngError("WritePng: sample count does not match image size");
  }

  const int bytes_per_sample = image.bit_depth / 8;
  std::vector<png_byte> buffer(per_row * bytes_per_sample * image.height);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    if (bytes_per_sample == 2) {
      buffer[2 * i] = static_cast<png_byte>(image.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(image.samples[i] & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(image.samples[i]);
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (int r = 0; r < image.height; ++r) {
    rows[r] = buffer.data() + per_row * bytes_per_sample * r;
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw PngError(path.string() + ": cannot open for writing");
  }
  ErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state,
                                            OnPngError, OnPngWarning);
  if (png == nullptr) throw PngError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw PngError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw PngError(path.string() + ": write failed: " + state.message);
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, image.width, image.height, image.bit_depth,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE,
               PNG_FILTER_TYPE_BASE);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage ReadGrayPng(const std::filesystem::path& path) {
  const PngImage png = ReadPng(path);
  if (png.channels != 1) {
    throw PngError(path.string() + ": expected a single-channel image, got " +
                   std::to_string(png.channels) + " channels");
  }
  if (png.bit_depth != 8) {
    throw PngError(path.string() + ": expected 8-bit samples, got " +
                   std::to_string(png.bit_depth));
  }
  GrayImage image(png.width, png.height);
  for (std::size_t i = 0; i < png.samples.size(); ++i) {
    image.pixels[i] = static_cast<std::uint8_t>(png.samples[i]);
  }
  return image;
}

void WriteGrayPng(const std::filesystem::path& path, const GrayImage& image) {
  PngImage png;
  png.width = image.width;
  png.height = image.height;
  png.bit_depth = 8;
  png.channels = 1;
  png.samples.assign(image.pixels.begin(), image.pixels.end());
  WritePng(path, png);
}

}  // namespace densify
