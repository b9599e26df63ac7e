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

#ifndef DENSIFY_MASKS_HPP_
#define DENSIFY_MASKS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace densify {

using InstanceId = std::uint16_t;

// Label image: one instance ID per pixel, 0 for background. Instances are
// disjoint by construction.
class InstanceMaskSet {
 public:
  InstanceMaskSet() = default;
  // Throws std::invalid_argument if labels.size() != width * height.
  InstanceMaskSet(int width, int height, std::vector<InstanceId> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  InstanceId label(int u, int v) const {
    return labels_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::span<const InstanceId> labels() const { return labels_; }
  // Sorted, distinct, nonzero.
  std::span<const InstanceId> instance_ids() const { return instance_ids_; }
  bool contains(InstanceId id) const;

  // Optional id -> class name metadata; never consulted by the expanders.
  const std::map<InstanceId, std::string>& class_names() const {
    return class_names_;
  }
  void set_class_names(std::map<InstanceId, std::string> names) {
    class_names_ = std::move(names);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<InstanceId> labels_;
  std::vector<InstanceId> instance_ids_;
  std::map<InstanceId, std::string> class_names_;
};

struct BoundingBox {
  int u_min = 0;
  int v_min = 0;
  int u_max = 0;  // inclusive
  int v_max = 0;  // inclusive

  bool operator==(const BoundingBox&) const = default;
};

struct Instance {
  InstanceId id = 0;
  std::size_t pixel_count = 0;
  BoundingBox bbox;

  bool operator==(const Instance&) const = default;
};

// One entry per instance ID, in ID order, with exact pixel counts and tight
// bounding boxes.
std::vector<Instance> Instances(const InstanceMaskSet& masks);

struct Pixel {
  int u = 0;
  int v = 0;

  bool operator==(const Pixel&) const = default;
};

class UnknownInstanceError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Lazily yields the pixels labeled `id` in row-major order. Throws
// UnknownInstanceError if `id` is not present. The view references `masks`.
inline auto RegionPixels(const InstanceMaskSet& masks, InstanceId id) {
  if (id == 0 || !masks.contains(id)) {
    throw UnknownInstanceError("unknown instance id " + std::to_string(id));
  }
  const int width = masks.width();
  const std::span<const InstanceId> labels = masks.labels();
  return std::views::iota(std::size_t{0}, labels.size()) |
         std::views::filter(
             [labels, id](std::size_t i) { return labels[i] == id; }) |
         std::views::transform([width](std::size_t i) {
           return Pixel{static_cast<int>(i % width),
                        static_cast<int>(i / width)};
         });
}

// Distinct diagnostics for the three ways a mask file can be the wrong shape.
class MaskFormatError : public std::runtime_error {
 public:
  enum class Kind {
    kSizeMismatch,
    kBitDepthMismatch,
    kMultiChannel,
    kUnreadable
  };

  MaskFormatError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Loads a 16-bit single-channel PNG label image of the expected size. Class
// names are read from `<stem>.json` next to the PNG when that file exists.
InstanceMaskSet LoadMasks(const std::filesystem::path& path, int expected_width,
                          int expected_height);
void WriteMasks(const std::filesystem::path& path,
                const InstanceMaskSet& masks);

}  // namespace densify

#endif  // DENSIFY_MASKS_HPP_
