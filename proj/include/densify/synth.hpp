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

// Synthetic scenes of fronto-parallel rectangles seen by one camera and one
// radar. Every output (radar sweeps, calibration, masks, ground truth and a
// flat-shaded camera image) is consistent under the sensor -> ego -> global
// frame chain, so the scenes double as end-to-end oracles.
//
// Object depths and per-sweep ego displacements are snapped to multiples of
// 1/256 m, and the fixed extrinsics use axis-permutation rotations with dyadic
// translations. With zero radar noise the frame chain therefore reproduces
// every object depth bit-exactly, and depth PNGs store it without loss.

#ifndef DENSIFY_SYNTH_HPP_
#define DENSIFY_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "densify/calibration.hpp"
#include "densify/depth_map.hpp"
#include "densify/masks.hpp"
#include "densify/radar.hpp"

namespace densify {

struct SceneSpec {
  std::uint64_t seed = 0;
  int object_count = 6;
  double depth_min = 5.;
  double depth_max = 60.;
  int radar_points_per_object = 3;  // per object and sweep
  double radar_noise_sigma = 0.;    // meters, along the viewing ray
  double ego_speed = 0.;            // m/s along ego +x
  int sweep_count = 5;
  std::int64_t sweep_interval_us = 50000;
  double cap = kDefaultDepthCap;

  int width = 704;
  int height = 256;
  double fx = 400.;
  double fy = 400.;
  double cx = 352.;
  double cy = 128.;

  // Throws std::invalid_argument on negative counts or a depth range outside
  // (0, cap].
  void Validate() const;
};

struct SyntheticObject {
  InstanceId id = 0;
  double depth = 0.;
  // Pixel rectangle before occlusion, clipped to the image, inclusive.
  int u_min = 0;
  int v_min = 0;
  int u_max = 0;
  int v_max = 0;
};

struct SyntheticScene {
  std::vector<RadarSweep> sweeps;  // newest first; sweeps[0] is the reference
  Calibration camera;              // intrinsics, cam_to_ego, reference pose
  InstanceMaskSet masks;           // visible part of every object
  SparseDepthMap ground_truth;     // object depth on every mask pixel
  GrayImage image;
  std::vector<SyntheticObject> objects;
};

class SceneGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic for a given spec. Throws SceneGenerationError if an object
// cannot be placed inside the image within a bounded number of attempts.
SyntheticScene Generate(const SceneSpec& spec);

// Writes the frame layout read by the pipeline:
//   <dir>/camera.png, masks.png, gt_depth.png, calib.json,
//   <dir>/radar/sweep_00.csv (+ .json sidecar), sweep_01.csv, ...
void WriteFrame(const std::filesystem::path& dir, const SyntheticScene& scene);

}  // namespace densify

#endif  // DENSIFY_SYNTH_HPP_
