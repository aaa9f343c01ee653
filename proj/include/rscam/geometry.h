/*
 * Copyright 2026 The rscam Authors. All Rights Reserved.
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
#ifndef RSCAM_GEOMETRY_H_
#define RSCAM_GEOMETRY_H_

#include <Eigen/Core>

namespace rscam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Image coordinates in pixels (column u, row v).
using PixelPoint = Vec2;
// Calibrated image coordinates, K^-1 applied.
using NormalizedPoint = Vec2;
// Inhomogeneous world point (x, y, z); the homogeneous form appends 1.
using WorldPoint = Vec3;

// Element of SO(3). Construction validates orthogonality and det = +1.
class Rotation {
 public:
  Rotation() : matrix_(Mat3::Identity()) {}

  // Throws std::invalid_argument unless R R^T = I and det R = 1 to `tol`.
  static Rotation FromMatrix(const Mat3& m, double tol = 1e-10);
  // Projects an approximately orthogonal matrix onto SO(3).
  static Rotation Orthonormalized(const Mat3& m);
  static Rotation Identity() { return Rotation(); }
  // No validation; for matrices orthogonal by construction.
  static Rotation FromMatrixUnchecked(const Mat3& m) { return Rotation(m, 0); }

  const Mat3& matrix() const { return matrix_; }
  Rotation inverse() const { return Rotation(matrix_.transpose(), 0); }
  Vec3 operator*(const Vec3& x) const { return matrix_ * x; }
  Rotation operator*(const Rotation& other) const {
    return Rotation(matrix_ * other.matrix_, 0);
  }

 private:
  Rotation(const Mat3& m, int /*trusted*/) : matrix_(m) {}
  Mat3 matrix_;
};

// Camera pose with x_cam = R * x_world + T. The viewpoint (optical centre in
// world coordinates) is -R^T T.
struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 viewpoint() const {
    return -(rotation.matrix().transpose() * translation);
  }
  Vec3 to_camera(const WorldPoint& x) const {
    return rotation * x + translation;
  }
  WorldPoint to_world(const Vec3& x_cam) const {
    return rotation.matrix().transpose() * (x_cam - translation);
  }
};

// Pin-hole intrinsics. K is kept upper triangular with K(2,2) = 1.
class CameraIntrinsics {
 public:
  CameraIntrinsics() = default;
  // Throws std::invalid_argument on a non upper-triangular K, a non-positive
  // diagonal or non-positive image dimensions.
  CameraIntrinsics(const Mat3& K, int width, int height);

  // Square pixels, principal point at the image centre, horizontal field of
  // view in degrees.
  static CameraIntrinsics FromFieldOfView(int width, int height,
                                          double hfov_deg);

  const Mat3& K() const { return K_; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Length of one pixel row in normalized units, 1 / K(1,1).
  double pixel_size() const { return 1.0 / K_(1, 1); }
  double principal_row() const { return K_(1, 2); }

  PixelPoint to_pixel(const NormalizedPoint& q) const;
  NormalizedPoint to_normalized(const PixelPoint& p) const;
  bool contains(const PixelPoint& p) const {
    return p.x() >= 0 && p.y() >= 0 && p.x() < width_ && p.y() < height_;
  }

 private:
  Mat3 K_ = Mat3::Identity();
  int width_ = 1;
  int height_ = 1;
};

// Constant-velocity motion: pose at t = 0 plus linear and angular velocity,
// both expressed in the camera frame so that
//   R(t) = exp(t [w]x) R(0),   T(t) = T(0) + v t.
struct MotionState {
  Pose pose0;
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();

  bool is_finite() const;
};

// Skew-symmetric matrix with hat(w) * u = w x u.
Mat3 hat(const Vec3& w);

// Rodrigues exponential of hat(w * t).
Rotation rotation_exp(const Vec3& w, double t);

// Axis-angle vector of R, angle in [0, pi].
Vec3 rotation_log(const Rotation& R);

// Camera matrix at time t. The linearized form is
//   K [ (I + t hat(w)) R(0) | T(0) + v t ],
// the exact one uses rotation_exp(w, t) R(0).
Mat34 camera_matrix_at(const MotionState& motion, const CameraIntrinsics& K,
                       double t, bool linearized);

// pi(P X) for the homogeneous point (X, 1). Throws DepthError when the
// depth component is below 1e-12 in magnitude.
PixelPoint project_perspective(const WorldPoint& X, const Mat34& P);

}  // namespace rscam

#endif  // RSCAM_GEOMETRY_H_
