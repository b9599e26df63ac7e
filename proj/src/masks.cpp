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

#include "densify/masks.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>

#include "densify/png_io.hpp"
#include "json.hpp"

namespace densify {

InstanceMaskSet::InstanceMaskSet(int width, int height,
                                 std::vector<InstanceId> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width <= 0 || height <= 0 ||
      labels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument(
        "InstanceMaskSet: label count does not match image size");
  }
  std::vector<bool> seen(std::numeric_limits<InstanceId>::max() + 1, false);
  for (InstanceId label : labels_) seen[label] = true;
  for (std::size_t id = 1; id < seen.size(); ++id) {
    if (seen[id]) instance_ids_.push_back(static_cast<InstanceId>(id));
  }
}

bool InstanceMaskSet::contains(InstanceId id) const {
  return std::binary_search(instance_ids_.begin(), instance_ids_.end(), id);
}

std::vector<Instance> Instances(const InstanceMaskSet& masks) {
  // Dense lookup from ID to slot; IDs are 16-bit so the table is small.
  std::vector<int> slot(std::numeric_limits<InstanceId>::max() + 1, -1);
  std::vector<Instance> instances;
  instances.reserve(masks.instance_ids().size());
  for (InstanceId id : masks.instance_ids()) {
    slot[id] = static_cast<int>(instances.size());
    instances.push_back(
        Instance{id, 0, BoundingBox{masks.width(), masks.height(), -1, -1}});
  }
  for (int v = 0; v < masks.height(); ++v) {
    for (int u = 0; u < masks.width(); ++u) {
      const InstanceId id = masks.label(u, v);
      if (id == 0) continue;
      Instance& instance = instances[slot[id]];
      ++instance.pixel_count;
      instance.bbox.u_min = std::min(instance.bbox.u_min, u);
      instance.bbox.v_min = std::min(instance.bbox.v_min, v);
      instance.bbox.u_max = std::max(instance.bbox.u_max, u);
      instance.bbox.v_max = std::max(instance.bbox.v_max, v);
    }
  }
  return instances;
}

InstanceMaskSet LoadMasks(const std::filesystem::path& path, int expected_width,
                          int expected_height) {
  PngImage png;
  try {
    png = ReadPng(path);
  } catch (const PngError& e) {
    throw MaskFormatError(MaskFormatError::Kind::kUnreadable, e.what());
  }
  if (png.channels != 1) {
    throw MaskFormatError(MaskFormatError::Kind::kMultiChannel,
                          path.string() +
                              ": mask must be single-channel, got " +
                              std::to_string(png.channels) + " channels");
  }
  if (png.bit_depth != 16) {
    throw MaskFormatError(MaskFormatError::Kind::kBitDepthMismatch,
                          path.string() + ": mask must be 16-bit, got " +
                              std::to_string(png.bit_depth) + "-bit");
  }
  if (png.width != expected_width || png.height != expected_height) {
    throw MaskFormatError(MaskFormatError::Kind::kSizeMismatch,
                          path.string() + ": mask is " +
                              std::to_string(png.width) + "x" +
                              std::to_string(png.height) + ", expected " +
                              std::to_string(expected_width) + "x" +
                              std::to_string(expected_height));
  }
  InstanceMaskSet masks(png.width, png.height, std::move(png.samples));

  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    const nlohmann::json names = nlohmann::json::parse(in, nullptr, false);
    if (names.is_discarded() || !names.is_object()) {
      throw MaskFormatError(
          MaskFormatError::Kind::kUnreadable,
          sidecar.string() + ": class sidecar must be a JSON object");
    }
    std::map<InstanceId, std::string> class_names;
    for (const auto& [key, value] : names.items()) {
      unsigned id = 0;
      const auto [end, ec] =
          std::from_chars(key.data(), key.data() + key.size(), id);
      if (ec != std::errc() || end != key.data() + key.size() || id == 0 ||
          id > 65535 || !value.is_string()) {
        throw MaskFormatError(MaskFormatError::Kind::kUnreadable,
                              sidecar.string() + ": entry '" + key +
                                  "' is not an instance id -> class name");
      }
      class_names[static_cast<InstanceId>(id)] = value.get<std::string>();
    }
    masks.set_class_names(std::move(class_names));
  }
  return masks;
}

void WriteMasks(const std::filesystem::path& path,
                const InstanceMaskSet& masks) {
  PngImage png;
  png.width = masks.width();
  png.height = masks.height();
  png.bit_depth = 16;
  png.channels = 1;
  png.samples.assign(masks.labels().begin(), masks.labels().end());
  WritePng(path, png);
}

}  // namespace densify
