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

#include <gtest/gtest.h>

#include "oracles.h"
#include "rscam/errors.h"

namespace rscam {
namespace {

// Pixel-row shutter whose first exposed row is the principal row, so that
// the first scanline sits at normalized v = 0.
ShutterParams centred_shutter(const CameraIntrinsics& K, double fps) {
  ShutterParams s = ShutterParams::ForFramerate(fps, K.height());
  s.first_row = -K.principal_row();
  return s;
}

MotionState fronto(const Vec2& v, double wz) {
  MotionState m;
  m.linear_velocity = Vec3(v.x(), v.y(), 0);
  m.angular_velocity = Vec3(0, 0, wz);
  return m;
}

TEST(FlowPerspective, Substitutions) {
  EXPECT_EQ(flow_perspective(0.1, 0.2, 3.0, MotionState{}).vec(), Vec2::Zero());
  const FlowVector f = flow_perspective(0.3, -0.4, 1.0, fronto({1, 0}, 0));
  EXPECT_DOUBLE_EQ(f.du, 1.0);
  EXPECT_DOUBLE_EQ(f.dv, 0.0);
  const FlowVector r = flow_perspective(0.3, -0.4, 5.0, fronto({0, 0}, 2.0));
  EXPECT_DOUBLE_EQ(r.du, 0.8);
  EXPECT_DOUBLE_EQ(r.dv, 0.6);
  // Tangent to circles about the principal point.
  EXPECT_NEAR(r.vec().dot(Vec2(0.3, -0.4)), 0.0, 1e-15);
  EXPECT_THROW(flow_perspective(0, 0, 0.0, MotionState{}), DepthError);
  MotionState tilt;
  tilt.angular_velocity.x() = 0.1;
  EXPECT_THROW(flow_perspective(0, 0, 1.0, tilt), std::invalid_argument);
}

TEST(FlowRollingShutter, StaticCameraHasNoFlow) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = centred_shutter(K, 15);
  EXPECT_EQ(flow_rolling_shutter(0.1, 0.05, 4, MotionState{}, K, s).vec(),
            Vec2::Zero());
  EXPECT_LT(flow_finite_difference(0.1, 0.05, 4, MotionState{}, K, s, 1e-3)
                .vec()
                .norm(),
            1e-12);
}

TEST(FlowRollingShutter, PureTranslationRescalesPerspectiveFlow) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = centred_shutter(K, 15);
  const double r = normalize_shutter(s, K).rate;
  oracle::Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const MotionState m = fronto({rng.uniform(-2, 2), rng.uniform(-2, 2)}, 0);
    const double u = rng.uniform(-0.3, 0.3), v = rng.uniform(0.0, 0.25);
    const double z = rng.uniform(2, 20);
    const FlowVector p = flow_perspective(u, v, z, m);
    const FlowVector f = flow_rolling_shutter(u, v, z, m, K, s);
    const Vec2 expected = r / (r - p.dv) * p.vec();
    EXPECT_LT((f.vec() - expected).norm(), 1e-13);
    EXPECT_EQ(f.vec(), flow_rolling_shutter_as_printed(u, v, z, m, K, s).vec());
  }
}

TEST(FlowRollingShutter, ConvergesToPerspectiveForFastScans) {
  const CameraIntrinsics K(Mat3::Identity(), 1, 1);
  const MotionState m = fronto({0.4, -0.3}, 0.2);
  ShutterParams s;
  double prev = 1e300;
  for (double r : {1e3, 1e4, 1e5, 1e6}) {
    s.scan_rate = r;
    const double err = (flow_rolling_shutter(0.2, 0.1, 3.0, m, K, s).vec() -
                        flow_perspective(0.2, 0.1, 3.0, m).vec())
                           .norm();
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-6);
}

// Finite-difference errors for h = 8, 4, 2 ms.
std::vector<double> fd_errors(double u, double v, double z,
                              const MotionState& m, const CameraIntrinsics& K,
                              const ShutterParams& s) {
  const Vec2 analytic = flow_rolling_shutter(u, v, z, m, K, s).vec();
  std::vector<double> errs;
  for (double h = 8e-3; h > 1e-3; h /= 2) {
    errs.push_back(
        (flow_finite_difference(u, v, z, m, K, s, h).vec() - analytic).norm());
  }
  return errs;
}

// The fronto-parallel image is affine in the frame start, so the central
// difference has no truncation term at all: what is left must sit far below
// C h^2 for any plausible C, and a wrong coupling sign shows up as an
// h-independent offset.
TEST(FlowRollingShutter, AgreesWithFiniteDifferencesToSecondOrder) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = centred_shutter(K, 15);
  oracle::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const MotionState m =
        fronto({rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.5, 3));
    const double u = rng.uniform(-0.3, 0.3), v = rng.uniform(0.02, 0.25);
    const double z = rng.uniform(2, 10);
    const std::vector<double> e = fd_errors(u, v, z, m, K, s);
    double h = 8e-3;
    for (double err : e) {
      EXPECT_LT(err, 1e-4 * h * h) << "point " << i << ", h " << h;
      h /= 2;
    }
  }
}

TEST(FlowRollingShutter, TranslationOnlyFiniteDifferenceIsExact) {
  // The image moves affinely with the frame start when there is no rotation.
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = centred_shutter(K, 15);
  const MotionState m = fronto({1.2, -0.8}, 0.0);
  for (double h : {1e-2, 1e-3}) {
    EXPECT_LT((flow_finite_difference(0.1, 0.1, 4, m, K, s, h).vec() -
               flow_rolling_shutter(0.1, 0.1, 4, m, K, s).vec())
                  .norm(),
              1e-10);
  }
}

TEST(FlowRollingShutter, PrintedCouplingSignDisagreesWithDerivative) {
  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(640, 480, 40);
  const ShutterParams s = centred_shutter(K, 15);
  const MotionState m = fronto({1.0, 0.5}, 2.0);
  const double u = 0.2, v = 0.15, z = 3.0;
  const Vec2 fd = flow_finite_difference(u, v, z, m, K, s, 1e-4).vec();
  const Vec2 good = flow_rolling_shutter(u, v, z, m, K, s).vec();
  const Vec2 printed = flow_rolling_shutter_as_printed(u, v, z, m, K, s).vec();
  EXPECT_LT((fd - good).norm(), 1e-8);
  EXPECT_GT((fd - printed).norm(), 1e-3);
  EXPECT_EQ(good.x(), printed.x());
}

TEST(FlowRollingShutter, ErrorCases) {
  const CameraIntrinsics K(Mat3::Identity(), 1, 1);
  ShutterParams s;
  s.scan_rate = 10.0;
  // v_p = vy / z = r.
  EXPECT_THROW(flow_rolling_shutter(0.0, 0.0, 1.0, fronto({0, 10}, 0), K, s),
               Singularity);
  s.first_row = 0.5;
  EXPECT_THROW(flow_rolling_shutter(0.0, 0.0, 1.0, fronto({0, 1}, 0), K, s),
               std::invalid_argument);
  s.first_row = 0.0;
  EXPECT_THROW(flow_rolling_shutter(0.0, 0.0, -1.0, fronto({0, 1}, 0), K, s),
               DepthError);
  EXPECT_THROW(flow_finite_difference(0, 0, 1, fronto({0, 1}, 0), K, s, 0.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace rscam
