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

#ifndef DENSIFY_EVAL_HPP_
#define DENSIFY_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "densify/depth_map.hpp"

namespace densify {

// Metrics are computed over the joint-valid set: pixels where both maps hold a
// depth in (0, cap]. Coverage reports how much of the ground truth that set
// covers, so sparse predictions are not silently compared as dense ones.
struct MetricReport {
  double abs_rel = 0.;
  double rmse = 0.;
  std::size_t evaluated_pixels = 0;
  double coverage = 0.;
  double cap = kDefaultDepthCap;
};

class EmptyEvaluationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Running sums for pooled evaluation across frames. Merging is associative;
// the aggregate is computed from pooled sums, never from per-frame means.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(double cap = kDefaultDepthCap) : cap_(cap) {}

  // Throws std::invalid_argument on a dimension mismatch.
  void Add(const SparseDepthMap& pred, const SparseDepthMap& gt);
  void Merge(const MetricAccumulator& other);

  std::size_t evaluated_pixels() const { return evaluated_; }
  std::size_t gt_valid_pixels() const { return gt_valid_; }
  double cap() const { return cap_; }

  // Throws EmptyEvaluationError when no pixel was evaluated.
  MetricReport Report() const;

 private:
  double cap_;
  double sum_abs_rel_ = 0.;
  double sum_squared_ = 0.;
  std::size_t evaluated_ = 0;
  std::size_t gt_valid_ = 0;
};

// Mean |pred - gt| / gt. Throws EmptyEvaluationError if nothing overlaps.
double AbsRel(const SparseDepthMap& pred, const SparseDepthMap& gt,
              double cap = kDefaultDepthCap);
// sqrt(mean (pred - gt)^2), meters.
double Rmse(const SparseDepthMap& pred, const SparseDepthMap& gt,
            double cap = kDefaultDepthCap);
MetricReport Evaluate(const SparseDepthMap& pred, const SparseDepthMap& gt,
                      double cap = kDefaultDepthCap);

// Depth PNG: 16-bit grayscale, stored value = round(depth * 256), 0 invalid.
inline constexpr double kDepthPngScale = 256.;
inline constexpr double kMaxPngDepth = 65535. / kDepthPngScale;

class DepthFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stored value for one depth; 0 for invalid (depth <= 0). Valid depths below
// half a quantization step are stored as 1 so they stay valid. Throws
// DepthFormatError above kMaxPngDepth.
std::uint16_t EncodeDepth(double depth);
double DecodeDepth(std::uint16_t stored);

void WriteDepthPng(const std::filesystem::path& path,
                   const SparseDepthMap& map);
// Pixels whose decoded depth exceeds `cap` are dropped.
SparseDepthMap ReadDepthPng(const std::filesystem::path& path,
                            double cap = kMaxPngDepth);

}  // namespace densify

#endif  // DENSIFY_EVAL_HPP_
