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

#ifndef DENSIFY_GEOM_HPP_
#define DENSIFY_GEOM_HPP_

#include <array>
#include <optional>

#include "Eigen/Core"
#include "Eigen/Geometry"

namespace densify {

// Rigid transform x -> R x + t. The rotation is kept as a unit quaternion,
// renormalized on construction and after every composition. Points are mapped
// through the cached 3x3 matrix, so axis-permutation rotations with dyadic
// translations transform dyadic coordinates exactly.
class Pose {
 public:
  Pose();
  Pose(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation);

  static Pose Identity() { return Pose(); }
  static Pose Translation(const Eigen::Vector3d& translation);
  static Pose Rotation(const Eigen::Quaterniond& rotation);

  // Builds a pose from a homogeneous 4x4 matrix. Throws std::invalid_argument
  // if the upper-left block is not a proper rotation (tolerance 1e-6) or the
  // last row is not (0, 0, 0, 1).
  static Pose FromMatrix(const Eigen::Matrix4d& matrix);
  // Row-major 16 values, the layout used by calibration files.
  static Pose FromRowMajor(const std::array<double, 16>& values);

  Eigen::Matrix4d ToMatrix() const;
  std::array<double, 16> ToRowMajor() const;

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  const Eigen::Matrix3d& rotation_matrix() const { return rotation_matrix_; }

  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const {
    return rotation_matrix_ * point + translation_;
  }
  // (a * b) applies b first, then a.
  Pose operator*(const Pose& other) const;

  Pose inverse() const;

 private:
  Eigen::Quaterniond rotation_;
  Eigen::Matrix3d rotation_matrix_;
  Eigen::Vector3d translation_;
};

Pose Compose(const Pose& a, const Pose& b);
Pose Invert(const Pose& pose);
Eigen::Vector3d TransformPoint(const Pose& pose, const Eigen::Vector3d& point);

// Pinhole model, camera frame +x right, +y down, +z forward. Rectified images
// only; no distortion terms.
class CameraIntrinsics {
 public:
  // Throws std::invalid_argument unless fx, fy > 0, width, height > 0,
  // 0 <= cx < width and 0 <= cy < height.
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                   int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Intrinsics of the window [x, x + w) x [y, y + h) of this image.
  CameraIntrinsics Cropped(int x, int y, int w, int h) const;

  bool operator==(const CameraIntrinsics&) const = default;

 private:
  double fx_;
  double fy_;
  double cx_;
  double cy_;
  int width_;
  int height_;
};

struct PixelDepth {
  int u = 0;
  int v = 0;
  double depth = 0.;

  bool operator==(const PixelDepth&) const = default;
};

inline constexpr double kDefaultMinProjectionDepth = 0.1;

// Projects a camera-frame point to the nearest pixel (ties to even). Returns
// nothing when z <= z_min or the rounded pixel falls outside the image.
std::optional<PixelDepth> Project(const CameraIntrinsics& intrinsics,
                                  const Eigen::Vector3d& point_cam,
                                  double z_min = kDefaultMinProjectionDepth);

// Unrounded image coordinates (u, v) of a camera-frame point with z != 0.
Eigen::Vector2d ProjectContinuous(const CameraIntrinsics& intrinsics,
                                  const Eigen::Vector3d& point_cam);

// Inverse of the pinhole projection at the given depth. Throws
// std::invalid_argument for depth <= 0 or non-finite depth.
Eigen::Vector3d Backproject(const CameraIntrinsics& intrinsics, double u,
                            double v, double depth);

}  // namespace densify

#endif  // DENSIFY_GEOM_HPP_
