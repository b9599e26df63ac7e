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

#ifndef DENSIFY_CALIBRATION_HPP_
#define DENSIFY_CALIBRATION_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "densify/geom.hpp"

namespace densify {

// One sensor's calibration at one instant:
//
//   { "intrinsics": [fx, fy, cx, cy], "width": W, "height": H,
//     "sensor_to_ego": [16 row-major], "ego_to_global": [16 row-major],
//     "timestamp_us": T }
//
// Radar sidecars carry the same object without the three camera keys. The
// matrices are stored verbatim so a read-write cycle is bit-exact.
struct Calibration {
  std::optional<CameraIntrinsics> intrinsics;
  std::array<double, 16> sensor_to_ego{};
  std::array<double, 16> ego_to_global{};
  std::int64_t timestamp_us = 0;

  Pose SensorToEgo() const { return Pose::FromRowMajor(sensor_to_ego); }
  Pose EgoToGlobal() const { return Pose::FromRowMajor(ego_to_global); }

  // Throws std::invalid_argument if no intrinsics are present.
  const CameraIntrinsics& Camera() const;

  static Calibration FromPoses(const Pose& sensor_to_ego,
                               const Pose& ego_to_global,
                               std::int64_t timestamp_us);
};

// Thrown for unreadable or schema-violating calibration files.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string CalibrationToJson(const Calibration& calibration);
Calibration CalibrationFromJson(const std::string& text,
                                const std::string& origin = "<memory>");

Calibration ReadCalibration(const std::filesystem::path& path);
void WriteCalibration(const std::filesystem::path& path,
                      const Calibration& calibration);

}  // namespace densify

#endif  // DENSIFY_CALIBRATION_HPP_
