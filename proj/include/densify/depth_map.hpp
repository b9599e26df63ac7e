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

#ifndef DENSIFY_DEPTH_MAP_HPP_
#define DENSIFY_DEPTH_MAP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace densify {

inline constexpr double kDefaultDepthCap = 80.;

// W x H grid of optional depths in meters. Depths are stored as doubles with
// 0 marking an invalid pixel; every present depth lies in (0, cap].
class SparseDepthMap {
 public:
  SparseDepthMap() = default;
  // Throws std::invalid_argument for non-positive size or cap.
  SparseDepthMap(int width, int height, double cap = kDefaultDepthCap);

  int width() const { return width_; }
  int height() const { return height_; }
  double cap() const { return cap_; }
  std::size_t size() const { return depth_.size(); }

  bool valid(int u, int v) const { return depth_[index(u, v)] > 0.; }
  std::optional<double> at(int u, int v) const {
    const double d = depth_[index(u, v)];
    return d > 0. ? std::optional<double>(d) : std::nullopt;
  }
  // Raw value, 0 when invalid.
  double raw(int u, int v) const { return depth_[index(u, v)]; }

  // Throws std::out_of_range unless depth lies in (0, cap].
  void set(int u, int v, double depth);
  // Keeps the smaller of the current and the new depth; same range contract.
  void set_min(int u, int v, double depth);
  void clear(int u, int v) { depth_[index(u, v)] = 0.; }

  // True iff depth is finite and lies in (0, cap].
  bool accepts(double depth) const;

  std::size_t valid_count() const;
  double density() const;

  std::span<const double> data() const { return depth_; }
  std::span<double> mutable_data() { return depth_; }

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  // Same pixels, restricted to (0, new_cap].
  SparseDepthMap WithCap(double new_cap) const;

  bool operator==(const SparseDepthMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double cap_ = kDefaultDepthCap;
  std::vector<double> depth_;
};

// Window [x, x + width) x [y, y + height). Throws std::out_of_range if the
// window does not fit inside the map.
struct CropWindow {
  int width = 704;
  int height = 256;
  int x = 0;
  int y = 0;

  bool operator==(const CropWindow&) const = default;
};

SparseDepthMap Crop(const SparseDepthMap& map, const CropWindow& window);

// 8-bit single-channel image used as the guide of the joint bilateral filter
// and as the flat-shaded synthetic camera image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int u, int v) const {
    return pixels[static_cast<std::size_t>(v) * width + u];
  }
  std::uint8_t& at(int u, int v) {
    return pixels[static_cast<std::size_t>(v) * width + u];
  }

  bool operator==(const GrayImage&) const = default;
};

GrayImage Crop(const GrayImage& image, const CropWindow& window);

}  // namespace densify

#endif  // DENSIFY_DEPTH_MAP_HPP_
