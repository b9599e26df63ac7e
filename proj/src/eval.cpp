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

#include "densify/eval.hpp"

#include <cmath>
#include <string>

#include "densify/png_io.hpp"

namespace densify {
namespace {

bool InRange(double d, double cap) { return d > 0. && d <= cap; }

}  // namespace

void MetricAccumulator::Add(const SparseDepthMap& pred,
                            const SparseDepthMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw std::invalid_argument(
        "evaluate: prediction is " + std::to_string(pred.width()) + "x" +
        std::to_string(pred.height()) + ", ground truth is " +
        std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!InRange(g[i], cap_)) continue;
    ++gt_valid_;
    if (!InRange(p[i], cap_)) continue;
    const double diff = p[i] - g[i];
    sum_abs_rel_ += std::abs(diff) / g[i];
    sum_squared_ += diff * diff;
    ++evaluated_;
  }
}

void MetricAccumulator::Merge(const MetricAccumulator& other) {
  sum_abs_rel_ += other.sum_abs_rel_;
  sum_squared_ += other.sum_squared_;
  evaluated_ += other.evaluated_;
  gt_valid_ += other.gt_valid_;
}

MetricReport MetricAccumulator::Report() const {
  if (evaluated_ == 0) {
    throw EmptyEvaluationError(
        "evaluate: no pixel is valid in both prediction and ground truth");
  }
  MetricReport report;
  const double n = static_cast<double>(evaluated_);
  report.abs_rel = sum_abs_rel_ / n;
  report.rmse = std::sqrt(sum_squared_ / n);
  report.evaluated_pixels = evaluated_;
  report.coverage = n / static_cast<double>(gt_valid_);
  report.cap = cap_;
  return report;
}

double AbsRel(const SparseDepthMap& pred, const SparseDepthMap& gt,
              double cap) {
  return Evaluate(pred, gt, cap).abs_rel;
}

double Rmse(const SparseDepthMap& pred, const SparseDepthMap& gt, double cap) {
  return Evaluate(pred, gt, cap).rmse;
}

MetricReport Evaluate(const SparseDepthMap& pred, const SparseDepthMap& gt,
                      double cap) {
  MetricAccumulator accumulator(cap);
  accumulator.Add(pred, gt);
  return accumulator.Report();
}

std::uint16_t EncodeDepth(double depth) {
  if (!(depth > 0.)) return 0;
  if (!(depth <= kMaxPngDepth)) {
    throw DepthFormatError("depth " + std::to_string(depth) +
                           " m exceeds the 16-bit PNG limit of " +
                           std::to_string(kMaxPngDepth) + " m");
  }
  const double stored = std::nearbyint(depth * kDepthPngScale);
  return stored < 1. ? 1 : static_cast<std::uint16_t>(stored);
}

double DecodeDepth(std::uint16_t stored) {
  return static_cast<double>(stored) / kDepthPngScale;
}

void WriteDepthPng(const std::filesystem::path& path,
                   const SparseDepthMap& map) {
  PngImage png;
  png.width = map.width();
  png.height = map.height();
  png.bit_depth = 16;
  png.channels = 1;
  png.samples.resize(map.size());
  const auto depth = map.data();
  for (std::size_t i = 0; i < depth.size(); ++i) {
    png.samples[i] = EncodeDepth(depth[i]);
  }
  WritePng(path, png);
}

SparseDepthMap ReadDepthPng(const std::filesystem::path& path, double cap) {
  PngImage png;
  try {
    png = ReadPng(path);
  } catch (const PngError& e) {
    throw DepthFormatError(e.what());
  }
  if (png.channels != 1 || png.bit_depth != 16) {
    throw DepthFormatError(path.string() +
                           ": depth PNG must be 16-bit single-channel");
  }
  SparseDepthMap map(png.width, png.height, cap);
  auto depth = map.mutable_data();
  for (std::size_t i = 0; i < png.samples.size(); ++i) {
    const double d = DecodeDepth(png.samples[i]);
    if (InRange(d, cap)) depth[i] = d;
  }
  return map;
}

}  // namespace densify
