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

#ifndef DENSIFY_PNG_IO_HPP_
#define DENSIFY_PNG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "densify/depth_map.hpp"

namespace densify {

class PngError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decoded PNG samples, interleaved, one uint16 per sample regardless of the
// stored bit depth. Palette images are expanded to RGB and sub-byte grayscale
// to 8 bits; `bit_depth` reports the depth after that expansion.
struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;
};

PngImage ReadPng(const std::filesystem::path& path);

// bit_depth is 8 or 16; channels is 1 (gray) or 3 (RGB). Output bytes depend
// only on the samples: fixed zlib level, no row filters, no ancillary chunks.
void WritePng(const std::filesystem::path& path, const PngImage& image);

GrayImage ReadGrayPng(const std::filesystem::path& path);
void WriteGrayPng(const std::filesystem::path& path, const GrayImage& image);

}  // namespace densify

#endif  // DENSIFY_PNG_IO_HPP_
