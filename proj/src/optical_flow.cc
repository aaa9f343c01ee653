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
#include "rscam/optical_flow.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "rscam/errors.h"

namespace rscam {

namespace {

constexpr double kZero = 1e-15;

void check_inputs(double z, const MotionState& m) {
  if (!(z > 0.0)) throw DepthError("flow needs a positive depth");
  if (std::abs(m.linear_velocity.z()) > kZero ||
      std::abs(m.angular_velocity.x()) > kZero ||
      std::abs(m.angular_velocity.y()) > kZero) {
    throw std::invalid_argument("analytic flow needs fronto-parallel motion");
  }
}

// Camera-frame velocity of the scene independent of position.
Vec3 effective_velocity(const MotionState& m) {
  return m.linear_velocity - m.angular_velocity.cross(m.pose0.translation);
}

FlowVector rolling_shutter_flow(double u, double v, double z,
                                const MotionState& m,
                                const CameraIntrinsics& K,
                                const ShutterParams& s, double coupling_sign) {
  check_inputs(z, m);
  const NormalizedShutter ns = normalize_shutter(s, K);
  if (std::abs(ns.first_row) > 1e-12) {
    throw std::invalid_argument(
        "analytic rolling-shutter flow assumes the first row at v = 0");
  }
  const FlowVector p = flow_perspective(u, v, z, m);
  const double r = ns.rate;
  const double wz = m.angular_velocity.z();
  const double vx = effective_velocity(m).x();
  const double denom = v * vx * wz + r * z * (r - p.dv);
  if (std::abs(denom) < 1e-12) {
    throw Singularity("rolling-shutter flow denominator vanishes");
  }
  const double scale = r * z / denom;
  return {scale * (r * p.du + wz * v * p.dv),
          scale * (r * p.dv + coupling_sign * wz * v * p.du), z};
}

}  // namespace

FlowVector flow_perspective(double u, double v, double z,
                            const MotionState& motion) {
  check_inputs(z, motion);
  const Vec3 vel = effective_velocity(motion);
  const double wz = motion.angular_velocity.z();
  return {vel.x() / z - wz * v, vel.y() / z + wz * u, z};
}

FlowVector flow_rolling_shutter(double u, double v, double z,
                                const MotionState& motion,
                                const CameraIntrinsics& K,
                                const ShutterParams& s) {
  return rolling_shutter_flow(u, v, z, motion, K, s, -1.0);
}

FlowVector flow_rolling_shutter_as_printed(double u, double v, double z,
                                           const MotionState& motion,
                                           const CameraIntrinsics& K,
                                           const ShutterParams& s) {
  return rolling_shutter_flow(u, v, z, motion, K, s, +1.0);
}

FlowVector flow_finite_difference(double u, double v, double z,
                                  const MotionState& motion,
                                  const CameraIntrinsics& K,
                                  const ShutterParams& s, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (!(z > 0.0)) throw DepthError("flow needs a positive depth");

  ScanOptions opts;
  opts.enforce_window = false;
  auto image = [&](const WorldPoint& X, double frame_start) -> Vec2 {
    opts.frame_start = frame_start;
    const ScanTime st = solve_scan_time(X, motion, K, s,
                                        ScanTimeCase::kGeneralQuadratic, opts);
    const Mat34 P = camera_matrix_at(motion, K, frame_start + st.time, true);
    return K.to_normalized(project_perspective(X, P));
  };

  // World point with camera-frame depth z whose frame-0 image is (u, v).
  const Vec2 target(u, v);
  Vec2 xy = z * target;
  auto to_world = [&](const Vec2& p) {
    return motion.pose0.to_world(Vec3(p.x(), p.y(), z));
  };
  for (int it = 0; it < 50; ++it) {
    const Vec2 g = image(to_world(xy), 0.0) - target;
    if (g.lpNorm<Eigen::Infinity>() < 1e-15) break;
    Eigen::Matrix2d J;
    const double step = 1e-6 * std::max(1.0, z);
    for (int k = 0; k < 2; ++k) {
      Vec2 d = Vec2::Zero();
      d[k] = step;
      J.col(k) = (image(to_world(xy + d), 0.0) -
                  image(to_world(xy - d), 0.0)) /
                 (2.0 * step);
    }
    xy -= J.inverse() * g;
  }

  const WorldPoint X = to_world(xy);
  const Vec2 flow = (image(X, h) - image(X, -h)) / (2.0 * h);
  return {flow.x(), flow.y(), z};
}

}  // namespace rscam
