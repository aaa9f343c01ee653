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
#ifndef RSCAM_OPTICAL_FLOW_H_
#define RSCAM_OPTICAL_FLOW_H_

#include "rscam/geometry.h"
#include "rscam/shutter_model.h"

namespace rscam {

// Image velocity in normalized units per second at a point of known depth.
struct FlowVector {
  double du = 0.0;
  double dv = 0.0;
  double depth = 0.0;

  Vec2 vec() const { return {du, dv}; }
};

// Fronto-parallel perspective flow (vx / z - wz v, vy / z + wz u).
// Throws DepthError for z <= 0, std::invalid_argument for other motions.
FlowVector flow_perspective(double u, double v, double z,
                            const MotionState& motion);

// Rolling-shutter flow of a fronto-parallel camera (v0 = 0, r normalized):
//   r z / (v vx wz + r z (r - vp)) * (r up + wz v vp, r vp - wz v up)
// where (up, vp) is the perspective flow. Throws Singularity when the
// denominator vanishes and std::invalid_argument unless the first exposed
// row maps to normalized v = 0.
FlowVector flow_rolling_shutter(double u, double v, double z,
                                const MotionState& motion,
                                const CameraIntrinsics& K,
                                const ShutterParams& s);

// Same expression with "+ wz v up" in the second component. Kept for
// comparison; it disagrees with the derivative of the projection when
// wz != 0.
FlowVector flow_rolling_shutter_as_printed(double u, double v, double z,
                                           const MotionState& motion,
                                           const CameraIntrinsics& K,
                                           const ShutterParams& s);

// Central difference of the rolling-shutter image of the fixed world point
// seen at (u, v) with depth z, across frame start times -h and +h.
FlowVector flow_finite_difference(double u, double v, double z,
                                  const MotionState& motion,
                                  const CameraIntrinsics& K,
                                  const ShutterParams& s, double h);

}  // namespace rscam

#endif  // RSCAM_OPTICAL_FLOW_H_
