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

#include "densify/bev.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace densify {
namespace {

constexpr double kNormalizationTolerance = 1e-6;
constexpr char kBevMagic[4] = {'B', 'E', 'V', 'G'};
constexpr std::size_t kBevHeaderBytes = 4 + 3 * 4 + 3 * 4;

int CellCount(double min, double max, double resolution, const char* axis) {
  const double extent = max - min;
  if (!(extent > 0.) || !(resolution > 0.) || !std::isfinite(extent)) {
    throw std::invalid_argument(std::string("BEV grid: empty ") + axis +
                                " range or non-positive resolution");
  }
  const double cells = std::round(extent / resolution);
  if (std::abs(cells * resolution - extent) > 1e-9 * std::max(1., extent)) {
    throw std::invalid_argument(std::string("BEV grid: ") + axis +
                                " extent is not a multiple of the resolution");
  }
  return static_cast<int>(cells);
}

void CheckPoolInputs(std::span<const FrustumPoint> frustum,
                     const FrustumFeatures& features) {
  if (frustum.size() != features.point_count()) {
    throw BevDimensionError("voxel pool: " + std::to_string(frustum.size()) +
                            " frustum points but " +
                            std::to_string(features.point_count()) +
                            " lifted features");
  }
}

// Target cell of one frustum point, or nothing when it is dropped.
std::optional<std::size_t> PoolTarget(const BevGrid& grid,
                                      const FrustumPoint& point,
                                      const Pose& cam_to_ego) {
  if (!(point.point_cam.z() > 0.)) return std::nullopt;
  const Eigen::Vector3d ego = cam_to_ego * point.point_cam;
  return grid.CellOf(ego.x(), ego.y());
}

void PutU32(std::vector<unsigned char>& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back((value >> (8 * i)) & 0xff);
}

void PutF32(std::vector<unsigned char>& out, float value) {
  PutU32(out, std::bit_cast<std::uint32_t>(value));
}

std::uint32_t GetU32(std::span<const unsigned char> bytes, std::size_t at) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) value |= std::uint32_t{bytes[at + i]} << (8 * i);
  return value;
}

float GetF32(std::span<const unsigned char> bytes, std::size_t at) {
  return std::bit_cast<float>(GetU32(bytes, at));
}

}  // namespace

DepthBins DepthBins::Uniform(double d_min, double d_max, int count) {
  if (!(d_min > 0.) || !(d_max > d_min) || count < 1) {
    throw std::invalid_argument(
        "DepthBins: need 0 < d_min < d_max and count >= 1");
  }
  std::vector<double> edges(count + 1);
  for (int i = 0; i <= count; ++i) {
    edges[i] = d_min + (d_max - d_min) * i / count;
  }
  edges.back() = d_max;
  return DepthBins(std::move(edges));
}

std::optional<int> DepthBins::BinOf(double depth) const {
  if (!(depth >= edges_.front() && depth < edges_.back())) return std::nullopt;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), depth);
  return static_cast<int>(std::distance(edges_.begin(), it)) - 1;
}

DepthDistribution::DepthDistribution(int width, int height, int bins,
                                     std::vector<double> probabilities)
    : width_(width),
      height_(height),
      bins_(bins),
      probabilities_(std::move(probabilities)) {
  if (width <= 0 || height <= 0 || bins <= 0 ||
      probabilities_.size() !=
          static_cast<std::size_t>(width) * height * bins) {
    throw std::invalid_argument("DepthDistribution: size mismatch");
  }
  for (std::size_t pixel = 0; pixel < probabilities_.size() / bins; ++pixel) {
    double sum = 0.;
    for (int b = 0; b < bins; ++b) {
      const double p = probabilities_[pixel * bins + b];
      if (!(p >= 0.)) {
        throw std::invalid_argument("DepthDistribution: negative entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.) > kNormalizationTolerance) {
      throw std::invalid_argument("DepthDistribution: pixel " +
                                  std::to_string(pixel) + " sums to " +
                                  std::to_string(sum));
    }
  }
}

DepthDistribution DepthDistribution::Uniform(int width, int height, int bins) {
  return DepthDistribution(
      width, height, bins,
      std::vector<double>(static_cast<std::size_t>(width) * height * bins,
                          1. / bins));
}

std::vector<FrustumPoint> MakeFrustum(const CameraIntrinsics& intrinsics,
                                      int downsample, const DepthBins& bins) {
  if (downsample < 1 || intrinsics.width() % downsample != 0 ||
      intrinsics.height() % downsample != 0) {
    throw std::invalid_argument(
        "MakeFrustum: downsample " + std::to_string(downsample) +
        " does not divide " + std::to_string(intrinsics.width()) + "x" +
        std::to_string(intrinsics.height()));
  }
  const int grid_w = intrinsics.width() / downsample;
  const int grid_h = intrinsics.height() / downsample;
  std::vector<FrustumPoint> frustum;
  frustum.reserve(static_cast<std::size_t>(grid_w) * grid_h * bins.count());
  for (int gv = 0; gv < grid_h; ++gv) {
    for (int gu = 0; gu < grid_w; ++gu) {
      const double u = FeatureCellCenter(gu, downsample);
      const double v = FeatureCellCenter(gv, downsample);
      for (int b = 0; b < bins.count(); ++b) {
        frustum.push_back(
            {gu, gv, b, Backproject(intrinsics, u, v, bins.center(b))});
      }
    }
  }
  return frustum;
}

FrustumFeatures Lift(const FeatureMap& features,
                     const DepthDistribution& dist) {
  if (features.width != dist.width() || features.height != dist.height()) {
    throw BevDimensionError(
        "lift: feature grid is " + std::to_string(features.width) + "x" +
        std::to_string(features.height) + ", depth grid is " +
        std::to_string(dist.width()) + "x" + std::to_string(dist.height()));
  }
  FrustumFeatures out;
  out.width = features.width;
  out.height = features.height;
  out.bins = dist.bins();
  out.channels = features.channels;
  out.values.resize(out.point_count() * out.channels);
  const int bins = out.bins;
  const int channels = out.channels;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < out.height; ++v) {
    for (int u = 0; u < out.width; ++u) {
      const std::size_t cell = static_cast<std::size_t>(v) * out.width + u;
      for (int b = 0; b < bins; ++b) {
        const double p = dist.at(u, v, b);
        double* dst = &out.values[(cell * bins + b) * channels];
        for (int c = 0; c < channels; ++c) dst[c] = p * features.at(u, v, c);
      }
    }
  }
  return out;
}

void BevGridSpec::Validate() const {
  cells_x();
  cells_y();
}

int BevGridSpec::cells_x() const {
  return CellCount(x_min, x_max, resolution, "x");
}

int BevGridSpec::cells_y() const {
  return CellCount(y_min, y_max, resolution, "y");
}

BevGrid::BevGrid(const BevGridSpec& spec, int channels)
    : spec_(spec),
      cells_x_(spec.cells_x()),
      cells_y_(spec.cells_y()),
      channels_(channels) {
  if (channels < 1) {
    throw std::invalid_argument("BevGrid: channels must be >= 1");
  }
  values_.assign(static_cast<std::size_t>(cells_x_) * cells_y_ * channels_, 0.);
}

std::optional<std::size_t> BevGrid::CellOf(double x, double y) const {
  const double fx = std::floor((x - spec_.x_min) / spec_.resolution);
  const double fy = std::floor((y - spec_.y_min) / spec_.resolution);
  if (!(fx >= 0. && fx < cells_x_ && fy >= 0. && fy < cells_y_)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(fx) * cells_y_ + static_cast<std::size_t>(fy);
}

BevGrid VoxelPool(std::span<const FrustumPoint> frustum,
                  const FrustumFeatures& features, const Pose& cam_to_ego,
                  const BevGridSpec& spec) {
  CheckPoolInputs(frustum, features);
  BevGrid grid(spec, features.channels);
  const std::int64_t n = static_cast<std::int64_t>(frustum.size());
  const std::size_t cell_count =
      static_cast<std::size_t>(grid.cells_x()) * grid.cells_y();

  std::vector<std::int64_t> target(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto cell = PoolTarget(grid, frustum[i], cam_to_ego);
    target[i] = cell ? static_cast<std::int64_t>(*cell) : -1;
  }

  // Stable counting sort by cell keeps frustum order inside each cell.
  std::vector<std::size_t> offsets(cell_count + 1, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    if (target[i] >= 0) ++offsets[target[i] + 1];
  }
  for (std::size_t c = 0; c < cell_count; ++c) offsets[c + 1] += offsets[c];
  std::vector<std::int64_t> order(offsets.back());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::int64_t i = 0; i < n; ++i) {
      if (target[i] >= 0) order[cursor[target[i]]++] = i;
    }
  }

  const int channels = features.channels;
  auto values = grid.mutable_values();
  const std::int64_t cells = static_cast<std::int64_t>(cell_count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    double* dst = &values[cell * channels];
    for (std::size_t k = offsets[cell]; k < offsets[cell + 1]; ++k) {
      const double* src = &features.values[order[k] * channels];
      for (int c = 0; c < channels; ++c) dst[c] += src[c];
    }
  }
  return grid;
}

namespace reference {

BevGrid VoxelPool(std::span<const FrustumPoint> frustum,
                  const FrustumFeatures& features, const Pose& cam_to_ego,
                  const BevGridSpec& spec) {
  CheckPoolInputs(frustum, features);
  BevGrid grid(spec, features.channels);
  auto values = grid.mutable_values();
  const int channels = features.channels;
  for (std::size_t i = 0; i < frustum.size(); ++i) {
    const auto cell = PoolTarget(grid, frustum[i], cam_to_ego);
    if (!cell) continue;
    for (int c = 0; c < channels; ++c) {
      values[*cell * channels + c] += features.values[i * channels + c];
    }
  }
  return grid;
}

}  // namespace reference

DepthLiftInput OneHotFromDepth(const SparseDepthMap& depth, int downsample,
                               const DepthBins& bins) {
  if (downsample < 1 || depth.width() % downsample != 0 ||
      depth.height() % downsample != 0) {
    throw std::invalid_argument("OneHotFromDepth: downsample " +
                                std::to_string(downsample) +
                                " does not divide the depth map size");
  }
  const int grid_w = depth.width() / downsample;
  const int grid_h = depth.height() / downsample;
  const int count = bins.count();
  std::vector<double> probabilities(
      static_cast<std::size_t>(grid_w) * grid_h * count, 0.);
  std::vector<bool> valid(static_cast<std::size_t>(grid_w) * grid_h, false);
  for (int gv = 0; gv < grid_h; ++gv) {
    for (int gu = 0; gu < grid_w; ++gu) {
      double nearest = 0.;
      for (int dv = 0; dv < downsample; ++dv) {
        for (int du = 0; du < downsample; ++du) {
          const double d =
              depth.raw(gu * downsample + du, gv * downsample + dv);
          if (d > 0. && (nearest == 0. || d < nearest)) nearest = d;
        }
      }
      const std::size_t cell = static_cast<std::size_t>(gv) * grid_w + gu;
      const auto bin = nearest > 0. ? bins.BinOf(nearest) : std::nullopt;
      if (bin) {
        probabilities[cell * count + *bin] = 1.;
        valid[cell] = true;
      } else {
        for (int b = 0; b < count; ++b) {
          probabilities[cell * count + b] = 1. / count;
        }
      }
    }
  }
  return {DepthDistribution(grid_w, grid_h, count, std::move(probabilities)),
          std::move(valid)};
}

std::vector<unsigned char> EncodeBevGrid(const BevGrid& grid) {
  std::vector<unsigned char> out;
  out.reserve(kBevHeaderBytes + grid.values().size() * 4);
  out.insert(out.end(), std::begin(kBevMagic), std::end(kBevMagic));
  PutU32(out, static_cast<std::uint32_t>(grid.cells_x()));
  PutU32(out, static_cast<std::uint32_t>(grid.cells_y()));
  PutU32(out, static_cast<std::uint32_t>(grid.channels()));
  PutF32(out, static_cast<float>(grid.spec().x_min));
  PutF32(out, static_cast<float>(grid.spec().y_min));
  PutF32(out, static_cast<float>(grid.spec().resolution));
  for (double value : grid.values()) PutF32(out, static_cast<float>(value));
  return out;
}

BevGrid DecodeBevGrid(std::span<const unsigned char> bytes) {
  if (bytes.size() < kBevHeaderBytes ||
      std::memcmp(bytes.data(), kBevMagic, 4) != 0) {
    throw BevFormatError("BEVG: bad magic or truncated header");
  }
  const std::uint32_t cells_x = GetU32(bytes, 4);
  const std::uint32_t cells_y = GetU32(bytes, 8);
  const std::uint32_t channels = GetU32(bytes, 12);
  BevGridSpec spec;
  spec.x_min = GetF32(bytes, 16);
  spec.y_min = GetF32(bytes, 20);
  spec.resolution = GetF32(bytes, 24);
  spec.x_max = spec.x_min + cells_x * spec.resolution;
  spec.y_max = spec.y_min + cells_y * spec.resolution;
  const std::size_t count =
      static_cast<std::size_t>(cells_x) * cells_y * channels;
  if (cells_x == 0 || cells_y == 0 || channels == 0 ||
      bytes.size() != kBevHeaderBytes + count * 4) {
    throw BevFormatError("BEVG: payload size does not match header");
  }
  BevGrid grid(spec, static_cast<int>(channels));
  auto values = grid.mutable_values();
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = GetF32(bytes, kBevHeaderBytes + 4 * i);
  }
  return grid;
}

void WriteBevGrid(const std::filesystem::path& path, const BevGrid& grid) {
  const std::vector<unsigned char> bytes = EncodeBevGrid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw BevFormatError(path.string() + ": cannot open for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

BevGrid ReadBevGrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BevFormatError(path.string() + ": cannot open");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return DecodeBevGrid(bytes);
}

}  // namespace densify
