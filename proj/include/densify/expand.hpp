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

// Radar depth densification.
//
// Four expanders share one contract: a SparseDepthMap in, a SparseDepthMap of
// the same size and cap out.
//
//   Raw            identity.
//   HeightExtend   stretch each return vertically by a metric height.
//   Jbf            joint bilateral filter guided by a grayscale image.
//   Insta          fill each instance mask with the nearest radar depth found
//                  inside it, then restore every original radar pixel.
//
// Each parallel kernel has a single-threaded twin in namespace `reference`
// that produces bit-identical output.

#ifndef DENSIFY_EXPAND_HPP_
#define DENSIFY_EXPAND_HPP_

#include <cstddef>
#include <string>
#include <variant>

#include "densify/depth_map.hpp"
#include "densify/geom.hpp"
#include "densify/masks.hpp"

namespace densify {

struct RawMethod {
  bool operator==(const RawMethod&) const = default;
};

struct HeightExtendMethod {
  double dh = 1.5;  // meters

  bool operator==(const HeightExtendMethod&) const = default;
};

struct JbfMethod {
  int radius = 15;       // pixels
  double sigma_s = 7.;   // pixels
  double sigma_r = 12.;  // guide intensity levels, guide in [0, 255]

  bool operator==(const JbfMethod&) const = default;
};

struct InstaMethod {
  // Dominant depth is this percentile (0..100) of the radar depths inside an
  // instance; 0 selects the minimum, i.e. the nearest return.
  double percentile = 0.;

  bool operator==(const InstaMethod&) const = default;
};

using ExpansionMethod =
    std::variant<RawMethod, HeightExtendMethod, JbfMethod, InstaMethod>;

// Throws std::invalid_argument for dh <= 0, radius < 1, sigma <= 0 or a
// percentile outside [0, 100].
void Validate(const ExpansionMethod& method);
// "raw", "height", "jbf" or "insta".
std::string MethodName(const ExpansionMethod& method);

struct ExpansionReport {
  double input_density = 0.;
  double output_density = 0.;
  std::size_t instances_total = 0;
  std::size_t instances_filled = 0;
};

struct ExpansionResult {
  SparseDepthMap map;
  ExpansionReport report;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ExpansionResult ExpandInsta(const SparseDepthMap& sparse,
                            const InstanceMaskSet& masks,
                            const InstaMethod& method = {});

// "Upward" is the camera's -y axis. Each valid pixel's column is filled from
// the projection of the segment top down to the pixel itself.
SparseDepthMap ExpandHeight(const SparseDepthMap& sparse,
                            const CameraIntrinsics& intrinsics, double dh);

SparseDepthMap ExpandJbf(const SparseDepthMap& sparse, const GrayImage& guide,
                         const JbfMethod& method = {});

struct ExpansionInputs {
  const SparseDepthMap* sparse = nullptr;
  const InstanceMaskSet* masks = nullptr;        // Insta
  const GrayImage* guide = nullptr;              // Jbf
  const CameraIntrinsics* intrinsics = nullptr;  // HeightExtend
};

// Dispatches on the method. Throws std::invalid_argument when the input the
// method needs is missing.
ExpansionResult Expand(const ExpansionMethod& method,
                       const ExpansionInputs& inputs);

namespace reference {

ExpansionResult ExpandInsta(const SparseDepthMap& sparse,
                            const InstanceMaskSet& masks,
                            const InstaMethod& method = {});
SparseDepthMap ExpandHeight(const SparseDepthMap& sparse,
                            const CameraIntrinsics& intrinsics, double dh);
SparseDepthMap ExpandJbf(const SparseDepthMap& sparse, const GrayImage& guide,
                         const JbfMethod& method = {});

}  // namespace reference
}  // namespace densify

#endif  // DENSIFY_EXPAND_HPP_
