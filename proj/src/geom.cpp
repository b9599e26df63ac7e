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

#include "densify/geom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace densify {
namespace {

constexpr double kRotationTolerance = 1e-6;

Eigen::Quaterniond Normalized(const Eigen::Quaterniond& q) {
  const double norm = q.norm();
  if (!(norm > 0.) || !std::isfinite(norm)) {
    throw std::invalid_argument("Pose: quaternion must be finite and nonzero");
  }
  return Eigen::Quaterniond(q.coeffs() / norm);
}

}  // namespace

Pose::Pose()
    : rotation_(Eigen::Quaterniond::Identity()),
      rotation_matrix_(Eigen::Matrix3d::Identity()),
      translation_(Eigen::Vector3d::Zero()) {}

Pose::Pose(const Eigen::Quaterniond& rotation,
           const Eigen::Vector3d& translation)
    : rotation_(Normalized(rotation)),
      rotation_matrix_(rotation_.toRotationMatrix()),
      translation_(translation) {
  if (!translation_.allFinite()) {
    throw std::invalid_argument("Pose: translation must be finite");
  }
}

Pose Pose::Translation(const Eigen::Vector3d& translation) {
  return Pose(Eigen::Quaterniond::Identity(), translation);
}

Pose Pose::Rotation(const Eigen::Quaterniond& rotation) {
  return Pose(rotation, Eigen::Vector3d::Zero());
}

Pose Pose::FromMatrix(const Eigen::Matrix4d& matrix) {
  if (!matrix.allFinite()) {
    throw std::invalid_argument("Pose: matrix has non-finite entries");
  }
  const Eigen::RowVector4d last_row = matrix.row(3);
  if ((last_row - Eigen::RowVector4d(0., 0., 0., 1.)).cwiseAbs().maxCoeff() >
      kRotationTolerance) {
    throw std::invalid_argument("Pose: last row must be (0, 0, 0, 1)");
  }
  const Eigen::Matrix3d rotation = matrix.topLeftCorner<3, 3>();
  const double orthogonality_error =
      (rotation * rotation.transpose() - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (orthogonality_error > kRotationTolerance ||
      std::abs(rotation.determinant() - 1.) > kRotationTolerance) {
    throw std::invalid_argument(
        "Pose: upper-left 3x3 block is not a proper rotation (error " +
        std::to_string(orthogonality_error) + ")");
  }
  return Pose(Eigen::Quaterniond(rotation), matrix.topRightCorner<3, 1>());
}

Pose Pose::FromRowMajor(const std::array<double, 16>& values) {
  Eigen::Matrix4d matrix;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      matrix(r, c) = values[r * 4 + c];
    }
  }
  return FromMatrix(matrix);
}

Eigen::Matrix4d Pose::ToMatrix() const {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Identity();
  matrix.topLeftCorner<3, 3>() = rotation_matrix_;
  matrix.topRightCorner<3, 1>() = translation_;
  return matrix;
}

std::array<double, 16> Pose::ToRowMajor() const {
  const Eigen::Matrix4d matrix = ToMatrix();
  std::array<double, 16> values;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      values[r * 4 + c] = matrix(r, c);
    }
  }
  return values;
}

Pose Pose::operator*(const Pose& other) const {
  return Pose(rotation_ * other.rotation_,
              rotation_matrix_ * other.translation_ + translation_);
}

Pose Pose::inverse() const {
  return Pose(rotation_.conjugate(),
              -(rotation_matrix_.transpose() * translation_));
}

Pose Compose(const Pose& a, const Pose& b) { return a * b; }

Pose Invert(const Pose& pose) { return pose.inverse(); }

Eigen::Vector3d TransformPoint(const Pose& pose, const Eigen::Vector3d& point) {
  return pose * point;
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy,
                                   int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(fx > 0.) || !(fy > 0.) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw std::invalid_argument("CameraIntrinsics: focal lengths must be > 0");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("CameraIntrinsics: image size must be > 0");
  }
  if (!(cx >= 0. && cx < width) || !(cy >= 0. && cy < height)) {
    throw std::invalid_argument(
        "CameraIntrinsics: principal point must lie inside the image");
  }
}

CameraIntrinsics CameraIntrinsics::Cropped(int x, int y, int w, int h) const {
  return CameraIntrinsics(fx_, fy_, cx_ - x, cy_ - y, w, h);
}

std::optional<PixelDepth> Project(const CameraIntrinsics& intrinsics,
                                  const Eigen::Vector3d& point_cam,
                                  double z_min) {
  const double z = point_cam.z();
  if (!(z > z_min) || !point_cam.allFinite()) {
    return std::nullopt;
  }
  // std::nearbyint honours the default FE_TONEAREST mode: ties go to even.
  const double u =
      std::nearbyint(intrinsics.fx() * point_cam.x() / z + intrinsics.cx());
  const double v =
      std::nearbyint(intrinsics.fy() * point_cam.y() / z + intrinsics.cy());
  if (!(u >= 0. && u < intrinsics.width() && v >= 0. &&
        v < intrinsics.height())) {
    return std::nullopt;
  }
  return PixelDepth{static_cast<int>(u), static_cast<int>(v), z};
}

Eigen::Vector2d ProjectContinuous(const CameraIntrinsics& intrinsics,
                                  const Eigen::Vector3d& point_cam) {
  return {intrinsics.fx() * point_cam.x() / point_cam.z() + intrinsics.cx(),
          intrinsics.fy() * point_cam.y() / point_cam.z() + intrinsics.cy()};
}

Eigen::Vector3d Backproject(const CameraIntrinsics& intrinsics, double u,
                            double v, double depth) {
  if (!(depth > 0.) || !std::isfinite(depth)) {
    throw std::invalid_argument("Backproject: depth must be finite and > 0");
  }
  return {(u - intrinsics.cx()) / intrinsics.fx() * depth,
          (v - intrinsics.cy()) / intrinsics.fy() * depth, depth};
}

}  // namespace densify
