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
#include "rscam/xslit.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "rscam/errors.h"

namespace rscam {

namespace {

constexpr double kZero = 1e-15;

void require_fronto_parallel(const MotionState& m) {
  if (std::abs(m.linear_velocity.z()) > kZero ||
      std::abs(m.angular_velocity.x()) > kZero ||
      std::abs(m.angular_velocity.y()) > kZero) {
    throw std::invalid_argument("motion must be fronto-parallel");
  }
}

Line3D to_world(const Pose& pose, const Vec3& point, const Vec3& direction) {
  return Line3D(pose.to_world(point),
                pose.rotation.matrix().transpose() * direction);
}

}  // namespace

Line3D::Line3D(const Vec3& point, const Vec3& direction) : point_(point) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !point.allFinite()) {
    throw std::invalid_argument("line needs a finite point and direction");
  }
  direction_ = direction / n;
}

SlitPair compute_slits(const MotionState& motion, const CameraIntrinsics& K,
                       const ShutterParams& s) {
  require_fronto_parallel(motion);
  if (motion.angular_velocity.cwiseAbs().maxCoeff() > kZero) {
    throw std::invalid_argument("crossed slits require zero rotation");
  }
  const double vx = motion.linear_velocity.x();
  const double vy = motion.linear_velocity.y();
  if (std::abs(vx) <= kZero && std::abs(vy) <= kZero) {
    throw DegenerateSlits("stationary camera: both slits pass through the "
                          "centre of projection");
  }
  const NormalizedShutter ns = normalize_shutter(s, K);
  const Vec3 slit2_point(0.0, -ns.first_row * vy / ns.rate, vy / ns.rate);
  return {to_world(motion.pose0, Vec3::Zero(), Vec3(vx, vy, 0.0)),
          to_world(motion.pose0, slit2_point, Vec3::UnitX())};
}

Vec3 backproject_at_depth(const NormalizedPoint& q, double depth,
                          const MotionState& motion,
                          const CameraIntrinsics& K, const ShutterParams& s) {
  require_fronto_parallel(motion);
  const NormalizedShutter ns = normalize_shutter(s, K);
  if (ns.rate == 0.0) throw Singularity("zero scan rate");

  // The row fixes the scan time; the remaining equations are linear in (x, y).
  const double wz = motion.angular_velocity.z();
  const Vec3 v_eff =
      motion.linear_velocity -
      motion.angular_velocity.cross(motion.pose0.translation);
  const double tc = (q.y() + ns.first_row) / ns.rate;
  Eigen::Matrix2d M;
  // clang-format off
  M << 1.0,     -tc * wz,
       tc * wz,  1.0;
  // clang-format on
  const Vec2 rhs = depth * q - tc * v_eff.head<2>();
  const Vec2 xy = M.inverse() * rhs;

  const double denom = ns.rate * depth - v_eff.y() - wz * xy.x();
  if (std::abs(denom) < 1e-12) {
    throw Singularity("inversion denominator vanishes");
  }
  return {xy.x(), xy.y(), depth};
}

Line3D backproject(const NormalizedPoint& q, const MotionState& motion,
                   const CameraIntrinsics& K, const ShutterParams& s) {
  const Vec3 a = backproject_at_depth(q, 1.0, motion, K, s);
  const Vec3 b = backproject_at_depth(q, 2.0, motion, K, s);
  const Vec3 c = backproject_at_depth(q, 3.0, motion, K, s);
  const Line3D line(a, b - a);
  const double off = (c - a).cross(line.direction()).norm();
  if (off > 1e-9 * (1.0 + c.norm())) {
    throw Error("back-projected locus is not a line");
  }
  return to_world(motion.pose0, a, b - a);
}

double line_line_distance(const Line3D& a, const Line3D& b) {
  const Vec3 n = a.direction().cross(b.direction());
  const Vec3 w = b.point() - a.point();
  const double nn = n.norm();
  if (nn < 1e-12) {
    return w.cross(a.direction()).norm();
  }
  return std::abs(w.dot(n)) / nn;
}

}  // namespace rscam
