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

// Geometric image-to-BEV view transform: a per-pixel categorical depth lifts
// per-pixel features into a camera frustum, and the frustum is sum-pooled into
// ground-plane cells of the ego frame (z is collapsed).

#ifndef DENSIFY_BEV_HPP_
#define DENSIFY_BEV_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "densify/depth_map.hpp"
#include "densify/geom.hpp"

namespace densify {

class DepthBins {
 public:
  // Uniformly spaced edges. Throws std::invalid_argument unless
  // 0 < d_min < d_max and count >= 1.
  static DepthBins Uniform(double d_min = 1., double d_max = 80.,
                           int count = 118);

  int count() const { return static_cast<int>(edges_.size()) - 1; }
  double d_min() const { return edges_.front(); }
  double d_max() const { return edges_.back(); }
  const std::vector<double>& edges() const { return edges_; }
  double center(int bin) const { return 0.5 * (edges_[bin] + edges_[bin + 1]); }
  // Bin containing `depth` under half-open [edge_i, edge_i+1) intervals.
  std::optional<int> BinOf(double depth) const;

 private:
  explicit DepthBins(std::vector<double> edges) : edges_(std::move(edges)) {}
  std::vector<double> edges_;
};

// Per-pixel C-vector on the feature grid, layout (v, u, c).
struct FeatureMap {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(int w, int h, int c, double fill = 0.)
      : width(w),
        height(h),
        channels(c),
        values(static_cast<std::size_t>(w) * h * c, fill) {}

  double& at(int u, int v, int c) {
    return values[(static_cast<std::size_t>(v) * width + u) * channels + c];
  }
  double at(int u, int v, int c) const {
    return values[(static_cast<std::size_t>(v) * width + u) * channels + c];
  }
};

// Per-pixel categorical distribution over depth bins, layout (v, u, bin).
class DepthDistribution {
 public:
  // Throws std::invalid_argument if any entry is negative or any pixel's
  // entries do not sum to 1 within 1e-6.
  DepthDistribution(int width, int height, int bins,
                    std::vector<double> probabilities);

  static DepthDistribution Uniform(int width, int height, int bins);

  int width() const { return width_; }
  int height() const { return height_; }
  int bins() const { return bins_; }
  double at(int u, int v, int bin) const {
    return probabilities_[(static_cast<std::size_t>(v) * width_ + u) * bins_ +
                          bin];
  }
  std::span<const double> probabilities() const { return probabilities_; }

 private:
  int width_;
  int height_;
  int bins_;
  std::vector<double> probabilities_;
};

struct FrustumPoint {
  int grid_u = 0;
  int grid_v = 0;
  int bin = 0;
  Eigen::Vector3d point_cam = Eigen::Vector3d::Zero();
};

// Center pixel of feature cell g at the given downsample factor.
inline double FeatureCellCenter(int g, int downsample) {
  return g * downsample + 0.5 * (downsample - 1);
}

// One point per (feature cell, bin): the cell-center pixel backprojected to
// the bin-center depth. Order is row-major over cells, then bins. Throws
// std::invalid_argument when downsample does not divide the image size.
std::vector<FrustumPoint> MakeFrustum(const CameraIntrinsics& intrinsics,
                                      int downsample, const DepthBins& bins);

// Frustum features, layout (v, u, bin, c), aligned with MakeFrustum's order.
struct FrustumFeatures {
  int width = 0;
  int height = 0;
  int bins = 0;
  int channels = 0;
  std::vector<double> values;

  std::size_t point_count() const {
    return static_cast<std::size_t>(width) * height * bins;
  }
};

class BevDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// frustum(u, v, bin) = dist(u, v, bin) * feature(u, v).
FrustumFeatures Lift(const FeatureMap& features, const DepthDistribution& dist);

struct BevGridSpec {
  double x_min = -51.2;
  double x_max = 51.2;
  double y_min = -51.2;
  double y_max = 51.2;
  double resolution = 0.8;

  // Throws std::invalid_argument unless both extents are positive integer
  // multiples of the resolution.
  void Validate() const;
  int cells_x() const;
  int cells_y() const;
};

// X x Y x C accumulators, layout (x, y, c).
class BevGrid {
 public:
  BevGrid(const BevGridSpec& spec, int channels);

  const BevGridSpec& spec() const { return spec_; }
  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  int channels() const { return channels_; }

  double& at(int ix, int iy, int c) {
    return values_[(static_cast<std::size_t>(ix) * cells_y_ + iy) * channels_ +
                   c];
  }
  double at(int ix, int iy, int c) const {
    return values_[(static_cast<std::size_t>(ix) * cells_y_ + iy) * channels_ +
                   c];
  }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }

  // Cell containing (x, y) with half-open cells; nothing outside the grid.
  std::optional<std::size_t> CellOf(double x, double y) const;

 private:
  BevGridSpec spec_;
  int cells_x_;
  int cells_y_;
  int channels_;
  std::vector<double> values_;
};

// Sums each frustum point's feature into the cell under its ego-frame (x, y).
// Points outside the grid or with z_cam <= 0 are dropped. Cells are reduced
// in frustum order, so the result is bit-identical to reference::VoxelPool.
BevGrid VoxelPool(std::span<const FrustumPoint> frustum,
                  const FrustumFeatures& features, const Pose& cam_to_ego,
                  const BevGridSpec& spec);

namespace reference {

BevGrid VoxelPool(std::span<const FrustumPoint> frustum,
                  const FrustumFeatures& features, const Pose& cam_to_ego,
                  const BevGridSpec& spec);

}  // namespace reference

// One-hot distribution per feature cell from a depth map: the nearest valid
// depth inside the cell selects the bin. Cells without a usable depth get a
// uniform distribution and `valid` is cleared for them.
struct DepthLiftInput {
  DepthDistribution distribution;
  std::vector<bool> valid;  // per feature cell, row-major
};
DepthLiftInput OneHotFromDepth(const SparseDepthMap& depth, int downsample,
                               const DepthBins& bins);

// Binary layout: "BEVG", u32 X, u32 Y, u32 C, f32 x_min, f32 y_min,
// f32 resolution, then X * Y * C f32 values (x-major, then y, then channel).
// All little-endian.
class BevFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<unsigned char> EncodeBevGrid(const BevGrid& grid);
BevGrid DecodeBevGrid(std::span<const unsigned char> bytes);
void WriteBevGrid(const std::filesystem::path& path, const BevGrid& grid);
BevGrid ReadBevGrid(const std::filesystem::path& path);

}  // namespace densify

#endif  // DENSIFY_BEV_HPP_
