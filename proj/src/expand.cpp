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

#include "densify/expand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace densify {
namespace {

constexpr double kMinWeightSum = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckSameSize(const SparseDepthMap& sparse, int width, int height,
                   const char* what) {
  if (sparse.width() != width || sparse.height() != height) {
    throw DimensionMismatchError(
        std::string("depth map is ") + std::to_string(sparse.width()) + "x" +
        std::to_string(sparse.height()) + " but " + what + " is " +
        std::to_string(width) + "x" + std::to_string(height));
  }
}

// Element at the given percentile of `depths` (nearest rank, rounding down).
// Partially reorders `depths`.
double SelectPercentile(std::vector<double>& depths, double percentile) {
  const std::size_t rank = static_cast<std::size_t>(
      std::floor(percentile / 100. * static_cast<double>(depths.size() - 1)));
  std::nth_element(depths.begin(), depths.begin() + rank, depths.end());
  return depths[rank];
}

ExpansionReport MakeReport(const SparseDepthMap& input,
                           const SparseDepthMap& output) {
  ExpansionReport report;
  report.input_density = input.density();
  report.output_density = output.density();
  return report;
}

// Rows of column u covered by projecting samples of the vertical segment
// [p, p - dh * y_hat] with p the backprojection of (u, v, depth). Samples are
// spaced at most one pixel apart so the covered rows are contiguous; the
// returned value is the topmost in-image row (<= v).
int ExtensionTopRow(const CameraIntrinsics& intrinsics, int u, int v,
                    double depth, double dh) {
  const Eigen::Vector3d base = Backproject(intrinsics, u, v, depth);
  const double extent_px = intrinsics.fy() * dh / depth;
  const int samples = std::max(1, static_cast<int>(std::ceil(extent_px)));
  int top = v;
  for (int i = 1; i <= samples; ++i) {
    const Eigen::Vector3d sample =
        base - Eigen::Vector3d(0., dh * i / samples, 0.);
    const auto pixel = Project(intrinsics, sample, 0.);
    if (!pixel) break;  // left the image through the top edge
    top = std::min(top, pixel->v);
  }
  return top;
}

double JbfAt(const SparseDepthMap& sparse, const GrayImage& guide, int qu,
             int qv, int radius, const std::vector<double>& spatial,
             const std::array<double, 256>& range) {
  const int width = sparse.width();
  const int height = sparse.height();
  const int guide_q = guide.at(qu, qv);
  double weighted = 0.;
  double weight_sum = 0.;
  const int side = 2 * radius + 1;
  for (int dv = -radius; dv <= radius; ++dv) {
    const int pv = qv + dv;
    if (pv < 0 || pv >= height) continue;
    for (int du = -radius; du <= radius; ++du) {
      const int pu = qu + du;
      if (pu < 0 || pu >= width) continue;
      const double d = sparse.raw(pu, pv);
      if (d <= 0.) continue;
      const double w = spatial[(dv + radius) * side + (du + radius)] *
                       range[std::abs(guide.at(pu, pv) - guide_q)];
      weighted += w * d;
      weight_sum += w;
    }
  }
  return weight_sum < kMinWeightSum ? 0. : weighted / weight_sum;
}

struct JbfTables {
  std::vector<double> spatial;
  std::array<double, 256> range;
};

JbfTables MakeJbfTables(const JbfMethod& method) {
  JbfTables tables;
  const int side = 2 * method.radius + 1;
  tables.spatial.resize(static_cast<std::size_t>(side) * side);
  for (int dv = -method.radius; dv <= method.radius; ++dv) {
    for (int du = -method.radius; du <= method.radius; ++du) {
      tables.spatial[(dv + method.radius) * side + (du + method.radius)] =
          std::exp(-static_cast<double>(du * du + dv * dv) /
                   (2. * method.sigma_s * method.sigma_s));
    }
  }
  for (int diff = 0; diff < 256; ++diff) {
    tables.range[diff] = std::exp(-static_cast<double>(diff * diff) /
                                  (2. * method.sigma_r * method.sigma_r));
  }
  return tables;
}

// A convex combination of depths in (0, cap] can only leave that range by
// rounding; clamp it back.
void StoreFiltered(SparseDepthMap& out, int u, int v, double value) {
  if (value <= 0.) return;
  out.mutable_data()[out.index(u, v)] = std::min(value, out.cap());
}

void CheckJbfInputs(const SparseDepthMap& sparse, const GrayImage& guide,
                    const JbfMethod& method) {
  Validate(method);
  CheckSameSize(sparse, guide.width, guide.height, "guide image");
}

}  // namespace

void Validate(const ExpansionMethod& method) {
  std::visit(
      Overloaded{
          [](const RawMethod&) {},
          [](const HeightExtendMethod& m) {
            if (!(m.dh > 0.) || !std::isfinite(m.dh)) {
              throw std::invalid_argument("height extension: dh must be > 0");
            }
          },
          [](const JbfMethod& m) {
            if (m.radius < 1) {
              throw std::invalid_argument("jbf: radius must be >= 1");
            }
            if (!(m.sigma_s > 0.) || !(m.sigma_r > 0.)) {
              throw std::invalid_argument("jbf: sigmas must be > 0");
            }
          },
          [](const InstaMethod& m) {
            if (!(m.percentile >= 0. && m.percentile <= 100.)) {
              throw std::invalid_argument(
                  "insta: percentile must be in [0, 100]");
            }
          },
      },
      method);
}

std::string MethodName(const ExpansionMethod& method) {
  return std::visit(Overloaded{
                        [](const RawMethod&) { return "raw"; },
                        [](const HeightExtendMethod&) { return "height"; },
                        [](const JbfMethod&) { return "jbf"; },
                        [](const InstaMethod&) { return "insta"; },
                    },
                    method);
}

ExpansionResult ExpandInsta(const SparseDepthMap& sparse,
                            const InstanceMaskSet& masks,
                            const InstaMethod& method) {
  Validate(method);
  CheckSameSize(sparse, masks.width(), masks.height(), "instance mask");

  const auto ids = masks.instance_ids();
  std::vector<int> slot(std::numeric_limits<InstanceId>::max() + 1, -1);
  for (std::size_t i = 0; i < ids.size(); ++i)
    slot[ids[i]] = static_cast<int>(i);

  const auto labels = masks.labels();
  const auto input = sparse.data();
  std::vector<std::vector<double>> depths(ids.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (labels[i] != 0 && input[i] > 0.) {
      depths[slot[labels[i]]].push_back(input[i]);
    }
  }

  // 0 marks an instance without radar evidence.
  std::vector<double> dominant(ids.size(), 0.);
  const std::int64_t instance_count = static_cast<std::int64_t>(ids.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < instance_count; ++i) {
    if (!depths[i].empty()) {
      dominant[i] = SelectPercentile(depths[i], method.percentile);
    }
  }

  // Labels are disjoint, so the per-pixel lookup equals filling instances in
  // descending dominant depth.
  ExpansionResult result{
      SparseDepthMap(sparse.width(), sparse.height(), sparse.cap()), {}};
  auto output = result.map.mutable_data();
  const std::int64_t n = static_cast<std::int64_t>(input.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (input[i] > 0.) {
      output[i] = input[i];
    } else if (labels[i] != 0) {
      output[i] = dominant[slot[labels[i]]];
    }
  }

  result.report = MakeReport(sparse, result.map);
  result.report.instances_total = ids.size();
  result.report.instances_filled = static_cast<std::size_t>(std::count_if(
      dominant.begin(), dominant.end(), [](double d) { return d > 0.; }));
  return result;
}

SparseDepthMap ExpandHeight(const SparseDepthMap& sparse,
                            const CameraIntrinsics& intrinsics, double dh) {
  Validate(HeightExtendMethod{dh});
  CheckSameSize(sparse, intrinsics.width(), intrinsics.height(),
                "camera image");
  SparseDepthMap extended(sparse.width(), sparse.height(), sparse.cap());
  auto ext = extended.mutable_data();
  // Extensions stay in their source column, so columns are independent.
#pragma omp parallel for schedule(dynamic, 16)
  for (int u = 0; u < sparse.width(); ++u) {
    for (int v = 0; v < sparse.height(); ++v) {
      const double d = sparse.raw(u, v);
      if (d <= 0.) continue;
      const int top = ExtensionTopRow(intrinsics, u, v, d, dh);
      for (int row = top; row <= v; ++row) {
        double& current = ext[extended.index(u, row)];
        if (current == 0. || d < current) current = d;
      }
    }
  }
  const auto input = sparse.data();
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] > 0.) ext[i] = input[i];
  }
  return extended;
}

SparseDepthMap ExpandJbf(const SparseDepthMap& sparse, const GrayImage& guide,
                         const JbfMethod& method) {
  CheckJbfInputs(sparse, guide, method);
  const JbfTables tables = MakeJbfTables(method);
  SparseDepthMap out(sparse.width(), sparse.height(), sparse.cap());
#pragma omp parallel for schedule(dynamic, 4)
  for (int v = 0; v < sparse.height(); ++v) {
    for (int u = 0; u < sparse.width(); ++u) {
      StoreFiltered(out, u, v,
                    JbfAt(sparse, guide, u, v, method.radius, tables.spatial,
                          tables.range));
    }
  }
  return out;
}

ExpansionResult Expand(const ExpansionMethod& method,
                       const ExpansionInputs& inputs) {
  Validate(method);
  if (inputs.sparse == nullptr) {
    throw std::invalid_argument("expand: no sparse depth map given");
  }
  const SparseDepthMap& sparse = *inputs.sparse;
  return std::visit(
      Overloaded{
          [&](const RawMethod&) {
            return ExpansionResult{sparse, MakeReport(sparse, sparse)};
          },
          [&](const HeightExtendMethod& m) {
            if (inputs.intrinsics == nullptr) {
              throw std::invalid_argument(
                  "expand: height extension needs camera intrinsics");
            }
            SparseDepthMap out = ExpandHeight(sparse, *inputs.intrinsics, m.dh);
            ExpansionReport report = MakeReport(sparse, out);
            return ExpansionResult{std::move(out), report};
          },
          [&](const JbfMethod& m) {
            if (inputs.guide == nullptr) {
              throw std::invalid_argument("expand: jbf needs a guide image");
            }
            SparseDepthMap out = ExpandJbf(sparse, *inputs.guide, m);
            ExpansionReport report = MakeReport(sparse, out);
            return ExpansionResult{std::move(out), report};
          },
          [&](const InstaMethod& m) {
            if (inputs.masks == nullptr) {
              throw std::invalid_argument("expand: insta needs instance masks");
            }
            return ExpandInsta(sparse, *inputs.masks, m);
          },
      },
      method);
}

namespace reference {

ExpansionResult ExpandInsta(const SparseDepthMap& sparse,
                            const InstanceMaskSet& masks,
                            const InstaMethod& method) {
  Validate(method);
  CheckSameSize(sparse, masks.width(), masks.height(), "instance mask");

  struct Filled {
    InstanceId id;
    double depth;
  };
  std::vector<Filled> filled;
  for (InstanceId id : masks.instance_ids()) {
    std::vector<double> depths;
    for (const Pixel& p : RegionPixels(masks, id)) {
      if (const auto d = sparse.at(p.u, p.v)) depths.push_back(*d);
    }
    if (depths.empty()) continue;
    filled.push_back({id, SelectPercentile(depths, method.percentile)});
  }
  // Farthest first so nearer instances are written last.
  std::stable_sort(
      filled.begin(), filled.end(),
      [](const Filled& a, const Filled& b) { return a.depth > b.depth; });

  ExpansionResult result{
      SparseDepthMap(sparse.width(), sparse.height(), sparse.cap()), {}};
  for (const Filled& f : filled) {
    for (const Pixel& p : RegionPixels(masks, f.id)) {
      result.map.set(p.u, p.v, f.depth);
    }
  }
  for (int v = 0; v < sparse.height(); ++v) {
    for (int u = 0; u < sparse.width(); ++u) {
      if (const auto d = sparse.at(u, v)) result.map.set(u, v, *d);
    }
  }
  result.report = MakeReport(sparse, result.map);
  result.report.instances_total = masks.instance_ids().size();
  result.report.instances_filled = filled.size();
  return result;
}

SparseDepthMap ExpandHeight(const SparseDepthMap& sparse,
                            const CameraIntrinsics& intrinsics, double dh) {
  Validate(HeightExtendMethod{dh});
  CheckSameSize(sparse, intrinsics.width(), intrinsics.height(),
                "camera image");
  SparseDepthMap extended(sparse.width(), sparse.height(), sparse.cap());
  for (int v = 0; v < sparse.height(); ++v) {
    for (int u = 0; u < sparse.width(); ++u) {
      const auto d = sparse.at(u, v);
      if (!d) continue;
      const int top = ExtensionTopRow(intrinsics, u, v, *d, dh);
      for (int row = top; row <= v; ++row) extended.set_min(u, row, *d);
    }
  }
  for (int v = 0; v < sparse.height(); ++v) {
    for (int u = 0; u < sparse.width(); ++u) {
      if (const auto d = sparse.at(u, v)) extended.set(u, v, *d);
    }
  }
  return extended;
}

SparseDepthMap ExpandJbf(const SparseDepthMap& sparse, const GrayImage& guide,
                         const JbfMethod& method) {
  CheckJbfInputs(sparse, guide, method);
  const JbfTables tables = MakeJbfTables(method);
  SparseDepthMap out(sparse.width(), sparse.height(), sparse.cap());
  for (int v = 0; v < sparse.height(); ++v) {
    for (int u = 0; u < sparse.width(); ++u) {
      StoreFiltered(out, u, v,
                    JbfAt(sparse, guide, u, v, method.radius, tables.spatial,
                          tables.range));
    }
  }
  return out;
}

}  // namespace reference
}  // namespace densify
