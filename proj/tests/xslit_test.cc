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
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rscam/errors.h"

namespace rscam {
namespace {

MotionState translating(const Vec3& v) {
  MotionState m;
  m.linear_velocity = v;
  return m;
}

ShutterParams unit_shutter(double rate, double first_row) {
  ShutterParams s;
  s.scan_rate = rate;
  s.first_row = first_row;
  return s;
}

TEST(LineLineDistance, CanonicalPairs) {
  const Line3D x_axis(Vec3::Zero(), Vec3::UnitX());
  EXPECT_EQ(line_line_distance(x_axis, x_axis), 0.0);
  EXPECT_NEAR(line_line_distance(x_axis, Line3D(Vec3(0, 1, 0), Vec3::UnitX())),
              1.0, 1e-15);
  EXPECT_NEAR(line_line_distance(x_axis, Line3D(Vec3(0, 0, 1), Vec3::UnitY())),
              1.0, 1e-15);
  EXPECT_NEAR(
      line_line_distance(x_axis, Line3D(Vec3(5, -2, 0), Vec3(1, 1, 0))), 0.0,
      1e-15);
  // Anti-parallel offset.
  EXPECT_NEAR(line_line_distance(x_axis, Line3D(Vec3(3, 0, 2), -Vec3::UnitX())),
              2.0, 1e-15);
}

TEST(Line3D, NormalizesAndValidates) {
  const Line3D l(Vec3(1, 2, 3), Vec3(0, 0, 7));
  EXPECT_NEAR(l.direction().norm(), 1.0, 1e-15);
  EXPECT_LT((l.at(2.0) - Vec3(1, 2, 5)).norm(), 1e-15);
  EXPECT_THROW(Line3D(Vec3::Zero(), Vec3::Zero()), std::invalid_argument);
  EXPECT_THROW(Line3D(Vec3::Zero(), Vec3(std::nan(""), 0, 1)),
               std::invalid_argument);
}

TEST(ComputeSlits, OrthogonalCrossedSlits) {
  const CameraIntrinsics K(Mat3::Identity(), 1, 1);
  const SlitPair p =
      compute_slits(translating(Vec3(0, 2.0, 0)), K, unit_shutter(10, 0));
  EXPECT_NEAR(std::abs(p.slit1.direction().y()), 1.0, 1e-15);
  EXPECT_LT(p.slit1.point().norm(), 1e-15);
  EXPECT_NEAR(std::abs(p.slit2.direction().x()), 1.0, 1e-15);
  EXPECT_NEAR(p.slit1.direction().dot(p.slit2.direction()), 0.0, 1e-15);
  // v0 = 0: slit2 lies at height 0 in the plane z = vy / r.
  EXPECT_NEAR(p.slit2.point().z(), 0.2, 1e-15);
  EXPECT_NEAR(p.slit2.point().y(), 0.0, 1e-15);
}

TEST(ComputeSlits, CollapseTowardsOriginAsSpeedVanishes) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = ShutterParams::ForFramerate(15, 480);
  double prev = 1e300;
  for (double v = 1.0; v > 1e-6; v /= 10) {
    const SlitPair p = compute_slits(translating(Vec3(0.3 * v, v, 0)), K, s);
    const double d = p.slit2.point().norm();
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-6);
  EXPECT_THROW(compute_slits(MotionState{}, K, s), DegenerateSlits);
}

TEST(ComputeSlits, RejectsRotationAndDepthMotion) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = ShutterParams::ForFramerate(15, 480);
  MotionState m = translating(Vec3(1, 1, 0));
  m.angular_velocity.z() = 0.5;
  EXPECT_THROW(compute_slits(m, K, s), std::invalid_argument);
  EXPECT_THROW(compute_slits(translating(Vec3(1, 1, 1)), K, s),
               std::invalid_argument);
  EXPECT_THROW(backproject(Vec2(0, 0), translating(Vec3(1, 1, 1)), K, s),
               std::invalid_argument);
}

TEST(Backproject, PinholeRay) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = ShutterParams::ForFramerate(15, 480);
  const Vec2 q(0.12, -0.07);
  const Line3D ray = backproject(q, MotionState{}, K, s);
  EXPECT_NEAR(line_line_distance(ray, Line3D(Vec3::Zero(),
                                             Vec3(q.x(), q.y(), 1.0))),
              0.0, 1e-12);
  EXPECT_NEAR(std::abs(ray.direction().dot(Vec3(q.x(), q.y(), 1).normalized())),
              1.0, 1e-12);
}

MotionState random_motion(oracle::Rng& rng, double wz) {
  MotionState m;
  m.pose0 = {Rotation::FromMatrix(rng.rotation(1.0)), rng.vec(-1, 1)};
  m.linear_velocity = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), 0);
  m.angular_velocity = Vec3(0, 0, wz);
  return m;
}

TEST(Backproject, PointsReprojectToQ) {
  oracle::Rng rng(31);
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 50);
  ShutterParams s = ShutterParams::ForFramerate(15, 480);
  s.first_row = -3.0;
  for (int i = 0; i < 40; ++i) {
    const MotionState m = random_motion(rng, i % 2 ? 0.0 : 0.7);
    const PixelPoint px(rng.uniform(10, 630), rng.uniform(10, 470));
    const Vec2 q = K.to_normalized(px);
    const Line3D line = backproject(q, m, K, s);
    for (double depth : {2.0, 5.0, 40.0}) {
      const WorldPoint X =
          m.pose0.to_world(backproject_at_depth(q, depth, m, K, s));
      EXPECT_LT((X - line.point()).cross(line.direction()).norm(), 1e-9);
      const RsProjection p = project_rolling_shutter(X, m, K, s, false);
      EXPECT_LT((p.pixel - px).norm(), 1e-9) << "depth " << depth;
      // The oracle agrees on the same point.
      const auto o = oracle::rs_pixel(X, m, K, s, true);
      ASSERT_TRUE(o);
      EXPECT_LT((*o - px).norm(), 1e-7);
    }
  }
}

double max_slit_residual(const MotionState& m, const CameraIntrinsics& K,
                         const ShutterParams& s) {
  MotionState translation = m;
  translation.angular_velocity.setZero();
  const SlitPair slits = compute_slits(translation, K, s);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const PixelPoint px(20 + 600.0 * i / 9, 20 + 440.0 * j / 9);
      const Line3D ray = backproject(K.to_normalized(px), m, K, s);
      worst = std::max({worst, line_line_distance(ray, slits.slit1),
                        line_line_distance(ray, slits.slit2)});
    }
  }
  return worst;
}

TEST(Backproject, RaysMeetBothSlits) {
  oracle::Rng rng(32);
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 50);
  for (double v0 : {0.0, -7.0, 12.5}) {
    ShutterParams s = ShutterParams::ForFramerate(15, 480);
    s.first_row = v0;
    for (int i = 0; i < 5; ++i) {
      EXPECT_LT(max_slit_residual(random_motion(rng, 0.0), K, s), 1e-9)
          << "v0 " << v0;
    }
  }
}

TEST(Backproject, RotationBreaksTheSlits) {
  oracle::Rng rng(33);
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 50);
  const ShutterParams s = ShutterParams::ForFramerate(15, 480);
  for (int i = 0; i < 5; ++i) {
    EXPECT_GT(max_slit_residual(random_motion(rng, 1.0), K, s), 1e-6);
  }
}

}  // namespace
}  // namespace rscam
