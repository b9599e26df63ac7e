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

#ifndef DENSIFY_RADAR_HPP_
#define DENSIFY_RADAR_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "densify/calibration.hpp"
#include "densify/depth_map.hpp"
#include "densify/geom.hpp"

namespace densify {

struct RadarPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // sensor frame, m
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();  // ego plane, m/s
  double rcs = 0.;                                     // dBsm
  std::int64_t timestamp_us = 0;

  bool operator==(const RadarPoint&) const = default;
};

struct RadarSweep {
  std::vector<RadarPoint> points;
  Pose sensor_to_ego;
  Pose ego_to_global;
  std::int64_t timestamp_us = 0;
};

inline constexpr char kRadarCsvHeader[] = "x,y,z,vx,vy,rcs,timestamp_us";
inline constexpr int kDefaultSweepCount = 5;

// Parse failure with the offending location, e.g. "sweep_00.csv:4: field
// 'vx': not a number: 'abc'".
class RadarParseError : public std::runtime_error {
 public:
  RadarParseError(const std::string& file, int line, const std::string& field,
                  const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  int line_;
  std::string field_;
};

std::vector<RadarPoint> ParseRadarCsv(const std::string& text,
                                      const std::string& origin = "<memory>");
// Shortest round-trip decimal formatting; ParseRadarCsv(FormatRadarCsv(p))
// reproduces p bit-exactly.
std::string FormatRadarCsv(std::span<const RadarPoint> points);

// Sidecar holding the sweep's calibration: `sweep_00.csv` -> `sweep_00.json`.
std::filesystem::path SweepCalibrationPath(const std::filesystem::path& csv);

// Reads the CSV and its calibration sidecar. Throws RadarParseError for CSV
// problems (including a missing sidecar) and CalibrationError for a broken
// sidecar.
RadarSweep ParseSweep(const std::filesystem::path& path);
void WriteSweep(const std::filesystem::path& path, const RadarSweep& sweep);

struct AccumulateOptions {
  // Displace each point by velocity * (reference_time - point_time) in the
  // sweep's ego frame before the frame chain. Off by default.
  bool compensate_velocity = false;
  std::int64_t reference_timestamp_us = 0;
};

// Maps the newest `count` sweeps (sweeps are ordered newest first) into the
// reference camera frame via
//   inv(ref_cam_to_ego) * inv(ref_ego_to_global) * ego_to_global *
//   sensor_to_ego
// and concatenates the results in sweep order. Throws std::invalid_argument
// if count is 0 or exceeds the number of sweeps.
std::vector<Eigen::Vector3d> Accumulate(std::span<const RadarSweep> sweeps,
                                        const Pose& ref_ego_to_global,
                                        const Pose& ref_cam_to_ego, int count,
                                        const AccumulateOptions& options = {});

// Projects every point, discards depths beyond `cap` and keeps the minimum
// depth per pixel. Parallel projection, deterministic result.
SparseDepthMap Rasterize(std::span<const Eigen::Vector3d> points_cam,
                         const CameraIntrinsics& intrinsics,
                         double cap = kDefaultDepthCap,
                         double z_min = kDefaultMinProjectionDepth);

namespace reference {

// Single-threaded Rasterize, kept as the comparison baseline.
SparseDepthMap Rasterize(std::span<const Eigen::Vector3d> points_cam,
                         const CameraIntrinsics& intrinsics,
                         double cap = kDefaultDepthCap,
                         double z_min = kDefaultMinProjectionDepth);

}  // namespace reference
}  // namespace densify

#endif  // DENSIFY_RADAR_HPP_
