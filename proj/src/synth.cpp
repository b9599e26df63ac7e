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

#include "densify/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "densify/eval.hpp"
#include "densify/png_io.hpp"

namespace densify {
namespace {

constexpr double kQuantum = 1. / 256.;
constexpr int kPlacementAttempts = 100;
constexpr std::uint8_t kBackgroundShade = 24;

double Snap(double value) { return std::round(value / kQuantum) * kQuantum; }

// Camera axes in the ego frame: forward -> +x, right -> -y, down -> -z.
Pose CameraToEgo() {
  Eigen::Matrix3d rotation;
  rotation << 0., 0., 1., -1., 0., 0., 0., -1., 0.;
  return Pose(Eigen::Quaterniond(rotation), Eigen::Vector3d(1.5, 0., 1.5));
}

Pose RadarToEgo() { return Pose::Translation(Eigen::Vector3d(3.5, 0., 0.5)); }

std::uint8_t ShadeFor(const SyntheticObject& object) {
  const double base = std::clamp(230. - 2.5 * object.depth, 48., 230.);
  return static_cast<std::uint8_t>(base) -
         static_cast<std::uint8_t>((object.id * 37) % 24);
}

}  // namespace

void SceneSpec::Validate() const {
  if (object_count < 0 || radar_points_per_object < 0 || sweep_count < 0) {
    throw std::invalid_argument("SceneSpec: counts must be >= 0");
  }
  if (object_count > 65535) {
    throw std::invalid_argument("SceneSpec: at most 65535 objects");
  }
  if (!(depth_min > 0.) || !(depth_max >= depth_min) || !(depth_max <= cap)) {
    throw std::invalid_argument("SceneSpec: depth range must lie in (0, cap]");
  }
  if (!(radar_noise_sigma >= 0.) || !std::isfinite(ego_speed) ||
      sweep_interval_us < 0) {
    throw std::invalid_argument("SceneSpec: invalid noise, speed or interval");
  }
}

SyntheticScene Generate(const SceneSpec& spec) {
  spec.Validate();
  const CameraIntrinsics intrinsics(spec.fx, spec.fy, spec.cx, spec.cy,
                                    spec.width, spec.height);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0., 1.);

  SyntheticScene scene;
  scene.ground_truth = SparseDepthMap(spec.width, spec.height, spec.cap);
  scene.image = GrayImage(spec.width, spec.height, kBackgroundShade);

  // Objects stand on a ground plane 1.5 m below the camera.
  for (int i = 0; i < spec.object_count; ++i) {
    SyntheticObject object;
    object.id = static_cast<InstanceId>(i + 1);
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const double depth = std::clamp(
          Snap(spec.depth_min + (spec.depth_max - spec.depth_min) * unit(rng)),
          spec.depth_min, spec.depth_max);
      const double half_width = 0.75 + 1.75 * unit(rng);
      const double height = 1. + 2. * unit(rng);
      const double lateral =
          (unit(rng) - 0.5) * 0.9 * depth * spec.width / spec.fx;
      const Eigen::Vector2d top_left = ProjectContinuous(
          intrinsics, {lateral - half_width, 1.5 - height, depth});
      const Eigen::Vector2d bottom_right =
          ProjectContinuous(intrinsics, {lateral + half_width, 1.5, depth});
      const int u_min = static_cast<int>(std::ceil(top_left.x()));
      const int v_min = static_cast<int>(std::ceil(top_left.y()));
      const int u_max = static_cast<int>(std::floor(bottom_right.x()));
      const int v_max = static_cast<int>(std::floor(bottom_right.y()));
      object.depth = depth;
      object.u_min = std::max(u_min, 0);
      object.v_min = std::max(v_min, 0);
      object.u_max = std::min(u_max, spec.width - 1);
      object.v_max = std::min(v_max, spec.height - 1);
      placed = object.u_min <= object.u_max && object.v_min <= object.v_max;
    }
    if (!placed) {
      throw SceneGenerationError(
          "object " + std::to_string(object.id) +
          " could not be placed inside the image after " +
          std::to_string(kPlacementAttempts) + " attempts");
    }
    scene.objects.push_back(object);
  }

  // Far to near, so nearer rectangles occlude farther ones.
  std::vector<const SyntheticObject*> paint_order;
  for (const SyntheticObject& object : scene.objects) {
    paint_order.push_back(&object);
  }
  std::stable_sort(paint_order.begin(), paint_order.end(),
                   [](const SyntheticObject* a, const SyntheticObject* b) {
                     return a->depth > b->depth;
                   });
  std::vector<InstanceId> labels(
      static_cast<std::size_t>(spec.width) * spec.height, 0);
  for (const SyntheticObject* object : paint_order) {
    const std::uint8_t shade = ShadeFor(*object);
    for (int v = object->v_min; v <= object->v_max; ++v) {
      for (int u = object->u_min; u <= object->u_max; ++u) {
        labels[static_cast<std::size_t>(v) * spec.width + u] = object->id;
        scene.ground_truth.set(u, v, object->depth);
        scene.image.at(u, v) = shade;
      }
    }
  }
  scene.masks = InstanceMaskSet(spec.width, spec.height, labels);

  std::vector<std::vector<Pixel>> visible(scene.objects.size());
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const InstanceId id =
          labels[static_cast<std::size_t>(v) * spec.width + u];
      if (id != 0) visible[id - 1].push_back({u, v});
    }
  }

  const Pose cam_to_ego = CameraToEgo();
  const Pose radar_to_ego = RadarToEgo();
  const double step =
      Snap(spec.ego_speed * 1e-6 * static_cast<double>(spec.sweep_interval_us));
  const std::int64_t ref_time_us = 1'000'000'000;
  auto ego_to_global_at = [&](int sweep) {
    return Pose::Translation(Eigen::Vector3d(100. - sweep * step, 50., 0.));
  };
  const Pose ref_ego_to_global = ego_to_global_at(0);

  scene.camera =
      Calibration::FromPoses(cam_to_ego, ref_ego_to_global, ref_time_us);
  scene.camera.intrinsics = intrinsics;

  std::normal_distribution<double> noise(0., 1.);
  const Pose cam_to_global = ref_ego_to_global * cam_to_ego;
  for (int s = 0; s < spec.sweep_count; ++s) {
    RadarSweep sweep;
    // Round-trip through the stored matrices so in-memory and on-disk sweeps
    // carry identical poses.
    const Calibration calibration =
        Calibration::FromPoses(radar_to_ego, ego_to_global_at(s),
                               ref_time_us - s * spec.sweep_interval_us);
    sweep.sensor_to_ego = calibration.SensorToEgo();
    sweep.ego_to_global = calibration.EgoToGlobal();
    sweep.timestamp_us = calibration.timestamp_us;
    const Pose global_to_radar =
        (sweep.ego_to_global * sweep.sensor_to_ego).inverse();
    for (std::size_t o = 0; o < scene.objects.size(); ++o) {
      if (visible[o].empty()) continue;
      for (int k = 0; k < spec.radar_points_per_object; ++k) {
        const Pixel pixel = visible[o][static_cast<std::size_t>(
            unit(rng) * static_cast<double>(visible[o].size()))];
        double depth = scene.objects[o].depth;
        if (spec.radar_noise_sigma > 0.) {
          depth = std::max(depth + spec.radar_noise_sigma * noise(rng),
                           2. * kDefaultMinProjectionDepth);
        }
        const Eigen::Vector3d point_cam =
            Backproject(intrinsics, pixel.u, pixel.v, depth);
        RadarPoint point;
        point.position = global_to_radar * (cam_to_global * point_cam);
        point.rcs = std::round(200. * unit(rng)) / 10.;
        point.timestamp_us = sweep.timestamp_us;
        sweep.points.push_back(point);
      }
    }
    scene.sweeps.push_back(std::move(sweep));
  }
  // Normalize camera poses through the same matrix round trip.
  scene.camera = CalibrationFromJson(CalibrationToJson(scene.camera));
  return scene;
}

void WriteFrame(const std::filesystem::path& dir, const SyntheticScene& scene) {
  std::filesystem::create_directories(dir / "radar");
  WriteGrayPng(dir / "camera.png", scene.image);
  WriteMasks(dir / "masks.png", scene.masks);
  WriteDepthPng(dir / "gt_depth.png", scene.ground_truth);
  WriteCalibration(dir / "calib.json", scene.camera);
  for (std::size_t s = 0; s < scene.sweeps.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof(name), "sweep_%02zu.csv", s);
    WriteSweep(dir / "radar" / name, scene.sweeps[s]);
  }
}

}  // namespace densify
