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
#include "rscam/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "rscam/errors.h"

namespace rscam {

namespace {
// Below this angle the series expansions are used in exp/log.
constexpr double kSmallAngle = 1e-8;
constexpr double kMinDepth = 1e-12;
}  // namespace

Rotation Rotation::FromMatrix(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    throw std::invalid_argument("rotation matrix has non-finite entries");
  }
  const Mat3 gram = m * m.transpose();
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("rotation matrix is not orthogonal");
  }
  if (std::abs(m.determinant() - 1.0) > tol) {
    throw std::invalid_argument("rotation matrix has determinant != 1");
  }
  return Rotation(m, 0);
}

Rotation Rotation::Orthonormalized(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0
                ? -1.0
                : 1.0;
  return Rotation(svd.matrixU() * D * svd.matrixV().transpose(), 0);
}

CameraIntrinsics::CameraIntrinsics(const Mat3& K, int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (!K.allFinite() || K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0) {
    throw std::invalid_argument("K must be finite and upper triangular");
  }
  if (K(0, 0) <= 0.0 || K(1, 1) <= 0.0 || K(2, 2) <= 0.0) {
    throw std::invalid_argument("K must have a positive diagonal");
  }
  K_ = K / K(2, 2);
}

CameraIntrinsics CameraIntrinsics::FromFieldOfView(int width, int height,
                                                   double hfov_deg) {
  if (!(hfov_deg > 0.0 && hfov_deg < 180.0)) {
    throw std::invalid_argument("field of view must lie in (0, 180) degrees");
  }
  const double focal =
      0.5 * width / std::tan(0.5 * hfov_deg * std::numbers::pi / 180.0);
  Mat3 K;
  // clang-format off
  K << focal, 0.0,   0.5 * width,
       0.0,   focal, 0.5 * height,
       0.0,   0.0,   1.0;
  // clang-format on
  return CameraIntrinsics(K, width, height);
}

PixelPoint CameraIntrinsics::to_pixel(const NormalizedPoint& q) const {
  return (K_ * q.homogeneous()).head<2>();
}

NormalizedPoint CameraIntrinsics::to_normalized(const PixelPoint& p) const {
  const double y = (p.y() - K_(1, 2)) / K_(1, 1);
  const double x = (p.x() - K_(0, 2) - K_(0, 1) * y) / K_(0, 0);
  return {x, y};
}

bool MotionState::is_finite() const {
  return pose0.rotation.matrix().allFinite() &&
         pose0.translation.allFinite() && linear_velocity.allFinite() &&
         angular_velocity.allFinite();
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -w.z(),  w.y(),
         w.z(),    0.0, -w.x(),
        -w.y(),  w.x(),    0.0;
  // clang-format on
  return m;
}

Rotation rotation_exp(const Vec3& w, double t) {
  const Vec3 phi = w * t;
  const double theta = phi.norm();
  const Mat3 W = hat(phi);
  Mat3 R;
  if (theta < kSmallAngle) {
    R = Mat3::Identity() + W + 0.5 * W * W;
  } else {
    R = Mat3::Identity() + (std::sin(theta) / theta) * W +
        ((1.0 - std::cos(theta)) / (theta * theta)) * W * W;
  }
  return Rotation::FromMatrixUnchecked(R);
}

Vec3 rotation_log(const Rotation& rotation) {
  const Mat3& R = rotation.matrix();
  const double cos_theta = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  const Vec3 vee(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));

  if (theta < kSmallAngle) {
    return 0.5 * vee;
  }
  if (theta < std::numbers::pi - 1e-6) {
    return (theta / (2.0 * std::sin(theta))) * vee;
  }

  // Near pi: axis from the symmetric part, a a^T = (B - cos I) / (1 - cos).
  const Mat3 B = 0.5 * (R + R.transpose());
  const Mat3 A = (B - cos_theta * Mat3::Identity()) / (1.0 - cos_theta);
  Eigen::Index k = 0;
  A.diagonal().maxCoeff(&k);
  Vec3 axis = A.col(k) / std::sqrt(std::max(A(k, k), 1e-300));
  axis.normalize();
  if (axis.dot(vee) < 0.0) axis = -axis;
  return theta * axis;
}

Mat34 camera_matrix_at(const MotionState& motion, const CameraIntrinsics& K,
                       double t, bool linearized) {
  const Mat3& R0 = motion.pose0.rotation.matrix();
  Mat3 Rt;
  if (linearized) {
    Rt = (Mat3::Identity() + t * hat(motion.angular_velocity)) * R0;
  } else {
    Rt = rotation_exp(motion.angular_velocity, t).matrix() * R0;
  }
  Mat34 Rt_T;
  Rt_T.leftCols<3>() = Rt;
  Rt_T.col(3) = motion.pose0.translation + motion.linear_velocity * t;
  return K.K() * Rt_T;
}

PixelPoint project_perspective(const WorldPoint& X, const Mat34& P) {
  const Vec3 x = P * X.homogeneous();
  if (std::abs(x.z()) < kMinDepth) {
    throw DepthError("point lies on the camera plane");
  }
  return x.head<2>() / x.z();
}

}  // namespace rscam
