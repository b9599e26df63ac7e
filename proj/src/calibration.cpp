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

#include "densify/calibration.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace densify {
namespace {

using nlohmann::json;

std::array<double, 16> ReadMatrix(const json& object, const char* key,
                                  const std::string& origin) {
  if (!object.contains(key)) {
    throw CalibrationError(origin + ": missing key '" + key + "'");
  }
  const json& values = object.at(key);
  if (!values.is_array() || values.size() != 16) {
    throw CalibrationError(origin + ": '" + key +
                           "' must be an array of 16 numbers");
  }
  std::array<double, 16> matrix;
  for (std::size_t i = 0; i < 16; ++i) {
    if (!values[i].is_number()) {
      throw CalibrationError(origin + ": '" + key + "'[" + std::to_string(i) +
                             "] is not a number");
    }
    matrix[i] = values[i].get<double>();
  }
  return matrix;
}

}  // namespace

const CameraIntrinsics& Calibration::Camera() const {
  if (!intrinsics) {
    throw std::invalid_argument("calibration has no camera intrinsics");
  }
  return *intrinsics;
}

Calibration Calibration::FromPoses(const Pose& sensor_to_ego,
                                   const Pose& ego_to_global,
                                   std::int64_t timestamp_us) {
  Calibration calibration;
  calibration.sensor_to_ego = sensor_to_ego.ToRowMajor();
  calibration.ego_to_global = ego_to_global.ToRowMajor();
  calibration.timestamp_us = timestamp_us;
  return calibration;
}

std::string CalibrationToJson(const Calibration& calibration) {
  // ordered_json keeps the documented key order in the output.
  nlohmann::ordered_json object;
  if (calibration.intrinsics) {
    const CameraIntrinsics& k = *calibration.intrinsics;
    object["intrinsics"] = {k.fx(), k.fy(), k.cx(), k.cy()};
    object["width"] = k.width();
    object["height"] = k.height();
  }
  object["sensor_to_ego"] = calibration.sensor_to_ego;
  object["ego_to_global"] = calibration.ego_to_global;
  object["timestamp_us"] = calibration.timestamp_us;
  return object.dump(2) + "\n";
}

Calibration CalibrationFromJson(const std::string& text,
                                const std::string& origin) {
  json object;
  try {
    object = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CalibrationError(origin + ": " + e.what());
  }
  if (!object.is_object()) {
    throw CalibrationError(origin + ": top level must be an object");
  }
  Calibration calibration;
  if (object.contains("intrinsics")) {
    const json& k = object.at("intrinsics");
    if (!k.is_array() || k.size() != 4 ||
        !std::all_of(k.begin(), k.end(),
                     [](const json& v) { return v.is_number(); })) {
      throw CalibrationError(origin +
                             ": 'intrinsics' must be [fx, fy, cx, cy]");
    }
    if (!object.contains("width") || !object.contains("height") ||
        !object.at("width").is_number_integer() ||
        !object.at("height").is_number_integer()) {
      throw CalibrationError(origin +
                             ": 'width' and 'height' must be integers");
    }
    try {
      calibration.intrinsics.emplace(k[0].get<double>(), k[1].get<double>(),
                                     k[2].get<double>(), k[3].get<double>(),
                                     object.at("width").get<int>(),
                                     object.at("height").get<int>());
    } catch (const std::invalid_argument& e) {
      throw CalibrationError(origin + ": " + e.what());
    }
  }
  calibration.sensor_to_ego = ReadMatrix(object, "sensor_to_ego", origin);
  calibration.ego_to_global = ReadMatrix(object, "ego_to_global", origin);
  if (!object.contains("timestamp_us") ||
      !object.at("timestamp_us").is_number_integer()) {
    throw CalibrationError(origin + ": 'timestamp_us' must be an integer");
  }
  calibration.timestamp_us = object.at("timestamp_us").get<std::int64_t>();
  try {
    calibration.SensorToEgo();
    calibration.EgoToGlobal();
  } catch (const std::invalid_argument& e) {
    throw CalibrationError(origin + ": " + e.what());
  }
  return calibration;
}

Calibration ReadCalibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibrationError(path.string() + ": cannot open calibration file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return CalibrationFromJson(buffer.str(), path.string());
}

void WriteCalibration(const std::filesystem::path& path,
                      const Calibration& calibration) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw CalibrationError(path.string() + ": cannot open for writing");
  }
  out << CalibrationToJson(calibration);
}

}  // namespace densify
