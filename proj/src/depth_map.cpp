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

#include "densify/depth_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace densify {

SparseDepthMap::SparseDepthMap(int width, int height, double cap)
    : width_(width), height_(height), cap_(cap) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("SparseDepthMap: size must be positive");
  }
  if (!(cap > 0.) || !std::isfinite(cap)) {
    throw std::invalid_argument("SparseDepthMap: cap must be finite and > 0");
  }
  depth_.assign(static_cast<std::size_t>(width) * height, 0.);
}

bool SparseDepthMap::accepts(double depth) const {
  return depth > 0. && depth <= cap_;
}

void SparseDepthMap::set(int u, int v, double depth) {
  if (!accepts(depth)) {
    throw std::out_of_range("SparseDepthMap: depth " + std::to_string(depth) +
                            " outside (0, cap]");
  }
  depth_[index(u, v)] = depth;
}

void SparseDepthMap::set_min(int u, int v, double depth) {
  if (!accepts(depth)) {
    throw std::out_of_range("SparseDepthMap: depth " + std::to_string(depth) +
                            " outside (0, cap]");
  }
  double& current = depth_[index(u, v)];
  if (current == 0. || depth < current) {
    current = depth;
  }
}

std::size_t SparseDepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(
      depth_.begin(), depth_.end(), [](double d) { return d > 0.; }));
}

double SparseDepthMap::density() const {
  return depth_.empty() ? 0.
                        : static_cast<double>(valid_count()) / depth_.size();
}

SparseDepthMap SparseDepthMap::WithCap(double new_cap) const {
  SparseDepthMap out(width_, height_, new_cap);
  for (std::size_t i = 0; i < depth_.size(); ++i) {
    if (depth_[i] > 0. && depth_[i] <= new_cap) {
      out.depth_[i] = depth_[i];
    }
  }
  return out;
}

namespace {

void CheckWindow(int width, int height, const CropWindow& window) {
  if (window.width <= 0 || window.height <= 0 || window.x < 0 || window.y < 0 ||
      window.x + window.width > width || window.y + window.height > height) {
    throw std::out_of_range(
        "crop window " + std::to_string(window.width) + "x" +
        std::to_string(window.height) + "+" + std::to_string(window.x) + "+" +
        std::to_string(window.y) + " does not fit a " + std::to_string(width) +
        "x" + std::to_string(height) + " image");
  }
}

}  // namespace

SparseDepthMap Crop(const SparseDepthMap& map, const CropWindow& window) {
  CheckWindow(map.width(), map.height(), window);
  SparseDepthMap out(window.width, window.height, map.cap());
  auto dst = out.mutable_data();
  for (int v = 0; v < window.height; ++v) {
    for (int u = 0; u < window.width; ++u) {
      dst[out.index(u, v)] = map.raw(u + window.x, v + window.y);
    }
  }
  return out;
}

GrayImage Crop(const GrayImage& image, const CropWindow& window) {
  CheckWindow(image.width, image.height, window);
  GrayImage out(window.width, window.height);
  for (int v = 0; v < window.height; ++v) {
    for (int u = 0; u < window.width; ++u) {
      out.at(u, v) = image.at(u + window.x, v + window.y);
    }
  }
  return out;
}

}  // namespace densify
