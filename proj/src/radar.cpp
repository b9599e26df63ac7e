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

#include "densify/radar.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace densify {
namespace {

constexpr std::array<const char*, 7> kFieldNames = {
    "x", "y", "z", "vx", "vy", "rcs", "timestamp_us"};

std::string_view TrimLineEnd(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
    line.remove_suffix(1);
  }
  return line;
}

template <typename T>
T ParseNumber(std::string_view token, const std::string& origin, int line,
              const char* field) {
  T value{};
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  // from_chars rejects a leading '+'; accept it for hand-written files.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw RadarParseError(origin, line, field,
                          "not a number: '" + std::string(token) + "'");
  }
  return value;
}

template <typename T>
void AppendNumber(std::string& out, T value) {
  std::array<char, 32> buffer;
  const auto [ptr, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  out.append(buffer.data(), ptr);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RadarParseError(path.string(), 0, "", "cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

RadarParseError::RadarParseError(const std::string& file, int line,
                                 const std::string& field,
                                 const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) +
                         (field.empty() ? "" : ": field '" + field + "'") +
                         ": " + message),
      file_(file),
      line_(line),
      field_(field) {}

std::vector<RadarPoint> ParseRadarCsv(const std::string& text,
                                      const std::string& origin) {
  std::vector<RadarPoint> points;
  std::string_view remaining = text;
  int line_number = 0;
  bool saw_header = false;
  while (!remaining.empty()) {
    const std::size_t newline = remaining.find('\n');
    std::string_view line = TrimLineEnd(remaining.substr(0, newline));
    remaining = newline == std::string_view::npos
                    ? std::string_view()
                    : remaining.substr(newline + 1);
    ++line_number;
    if (!saw_header) {
      if (line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
        line.remove_prefix(3);
      }
      if (line != kRadarCsvHeader) {
        throw RadarParseError(origin, line_number, "header",
                              "expected '" + std::string(kRadarCsvHeader) +
                                  "', got '" + std::string(line) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::array<std::string_view, kFieldNames.size()> tokens;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (count == tokens.size()) {
        throw RadarParseError(origin, line_number, "",
                              "too many fields (expected 7)");
      }
      tokens[count++] = line.substr(start, comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != tokens.size()) {
      throw RadarParseError(origin, line_number, kFieldNames[count],
                            "missing field");
    }

    RadarPoint point;
    for (int i = 0; i < 3; ++i) {
      point.position[i] =
          ParseNumber<double>(tokens[i], origin, line_number, kFieldNames[i]);
    }
    if (!point.position.allFinite()) {
      throw RadarParseError(origin, line_number, "x",
                            "position must be finite");
    }
    point.velocity.x() =
        ParseNumber<double>(tokens[3], origin, line_number, kFieldNames[3]);
    point.velocity.y() =
        ParseNumber<double>(tokens[4], origin, line_number, kFieldNames[4]);
    point.rcs =
        ParseNumber<double>(tokens[5], origin, line_number, kFieldNames[5]);
    point.timestamp_us = ParseNumber<std::int64_t>(tokens[6], origin,
                                                   line_number, kFieldNames[6]);
    if (point.timestamp_us < 0) {
      throw RadarParseError(origin, line_number, kFieldNames[6],
                            "timestamp must be >= 0");
    }
    points.push_back(point);
  }
  if (!saw_header) {
    throw RadarParseError(origin, 1, "header", "file is empty");
  }
  return points;
}

std::string FormatRadarCsv(std::span<const RadarPoint> points) {
  std::string out = kRadarCsvHeader;
  out += '\n';
  for (const RadarPoint& p : points) {
    AppendNumber(out, p.position.x());
    out += ',';
    AppendNumber(out, p.position.y());
    out += ',';
    AppendNumber(out, p.position.z());
    out += ',';
    AppendNumber(out, p.velocity.x());
    out += ',';
    AppendNumber(out, p.velocity.y());
    out += ',';
    AppendNumber(out, p.rcs);
    out += ',';
    AppendNumber(out, p.timestamp_us);
    out += '\n';
  }
  return out;
}

std::filesystem::path SweepCalibrationPath(const std::filesystem::path& csv) {
  std::filesystem::path sidecar = csv;
  sidecar.replace_extension(".json");
  return sidecar;
}

RadarSweep ParseSweep(const std::filesystem::path& path) {
  const std::filesystem::path sidecar = SweepCalibrationPath(path);
  if (!std::filesystem::exists(sidecar)) {
    throw RadarParseError(path.string(), 0, "",
                          "missing calibration sidecar " + sidecar.string());
  }
  RadarSweep sweep;
  sweep.points = ParseRadarCsv(ReadFile(path), path.string());
  const Calibration calibration = ReadCalibration(sidecar);
  sweep.sensor_to_ego = calibration.SensorToEgo();
  sweep.ego_to_global = calibration.EgoToGlobal();
  sweep.timestamp_us = calibration.timestamp_us;
  return sweep;
}

void WriteSweep(const std::filesystem::path& path, const RadarSweep& sweep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open for writing");
  }
  out << FormatRadarCsv(sweep.points);
  WriteCalibration(
      SweepCalibrationPath(path),
      Calibration::FromPoses(sweep.sensor_to_ego, sweep.ego_to_global,
                             sweep.timestamp_us));
}

std::vector<Eigen::Vector3d> Accumulate(std::span<const RadarSweep> sweeps,
                                        const Pose& ref_ego_to_global,
                                        const Pose& ref_cam_to_ego, int count,
                                        const AccumulateOptions& options) {
  if (count <= 0) {
    throw std::invalid_argument("Accumulate: sweep count must be >= 1");
  }
  if (static_cast<std::size_t>(count) > sweeps.size()) {
    throw std::invalid_argument("Accumulate: requested " +
                                std::to_string(count) + " sweeps, only " +
                                std::to_string(sweeps.size()) + " available");
  }
  const Pose global_to_cam = (ref_ego_to_global * ref_cam_to_ego).inverse();
  std::size_t total = 0;
  for (int s = 0; s < count; ++s) total += sweeps[s].points.size();

  std::vector<Eigen::Vector3d> points;
  points.reserve(total);
  for (int s = 0; s < count; ++s) {
    const RadarSweep& sweep = sweeps[s];
    const Pose ego_to_cam = global_to_cam * sweep.ego_to_global;
    for (const RadarPoint& point : sweep.points) {
      Eigen::Vector3d in_ego = sweep.sensor_to_ego * point.position;
      if (options.compensate_velocity) {
        const double dt =
            1e-6 * static_cast<double>(options.reference_timestamp_us -
                                       point.timestamp_us);
        in_ego.x() += point.velocity.x() * dt;
        in_ego.y() += point.velocity.y() * dt;
      }
      points.push_back(ego_to_cam * in_ego);
    }
  }
  return points;
}

SparseDepthMap Rasterize(std::span<const Eigen::Vector3d> points_cam,
                         const CameraIntrinsics& intrinsics, double cap,
                         double z_min) {
  SparseDepthMap map(intrinsics.width(), intrinsics.height(), cap);
  const std::int64_t n = static_cast<std::int64_t>(points_cam.size());
  std::vector<std::int64_t> target(n, -1);
  std::vector<double> depth(n, 0.);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto pixel = Project(intrinsics, points_cam[i], z_min);
    if (pixel && map.accepts(pixel->depth)) {
      target[i] = static_cast<std::int64_t>(map.index(pixel->u, pixel->v));
      depth[i] = pixel->depth;
    }
  }

  // Min is order-free, so a serial scatter gives the reference result.
  auto data = map.mutable_data();
  for (std::int64_t i = 0; i < n; ++i) {
    if (target[i] < 0) continue;
    double& current = data[target[i]];
    if (current == 0. || depth[i] < current) current = depth[i];
  }
  return map;
}

namespace reference {

SparseDepthMap Rasterize(std::span<const Eigen::Vector3d> points_cam,
                         const CameraIntrinsics& intrinsics, double cap,
                         double z_min) {
  SparseDepthMap map(intrinsics.width(), intrinsics.height(), cap);
  for (const Eigen::Vector3d& point : points_cam) {
    const auto pixel = Project(intrinsics, point, z_min);
    if (pixel && map.accepts(pixel->depth)) {
      map.set_min(pixel->u, pixel->v, pixel->depth);
    }
  }
  return map;
}

}  // namespace reference
}  // namespace densify
