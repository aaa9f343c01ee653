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
#ifndef RSCAM_XSLIT_H_
#define RSCAM_XSLIT_H_

#include "rscam/geometry.h"
#include "rscam/shutter_model.h"

namespace rscam {

// Infinite line, point + unit direction.
class Line3D {
 public:
  // Throws std::invalid_argument on a zero or non-finite direction.
  Line3D(const Vec3& point, const Vec3& direction);

  const Vec3& point() const { return point_; }
  const Vec3& direction() const { return direction_; }
  Vec3 at(double s) const { return point_ + s * direction_; }

 private:
  Vec3 point_;
  Vec3 direction_;
};

// The two lines every back-projected ray of a translating rolling-shutter
// camera passes through.
struct SlitPair {
  Line3D slit1;  // through the centre of projection along (vx, vy, 0)
  Line3D slit2;  // horizontal line in the plane z = vy / r
};

// Slits of a camera translating with v = (vx, vy, 0) and no rotation, in
// world coordinates. With R(0) = I, T(0) = 0 and normalized r, v0:
//   slit1: through (0, 0, 0) and (vx, vy, 0)
//   slit2: through (+-1, -v0 vy / r, vy / r)
// Throws DegenerateSlits when vx = vy = 0 and std::invalid_argument when the
// motion has rotation or depth velocity.
SlitPair compute_slits(const MotionState& motion, const CameraIntrinsics& K,
                       const ShutterParams& s);

// Locus of world points imaged at q (normalized coordinates) by a
// fronto-parallel rolling-shutter camera. Solved per depth from the
// closed-form projection; the returned line is fitted through two depths and
// checked at a third. Throws Singularity on a degenerate inversion and
// std::invalid_argument for motion that is not fronto-parallel.
Line3D backproject(const NormalizedPoint& q, const MotionState& motion,
                   const CameraIntrinsics& K, const ShutterParams& s);

// Camera-frame point (depth z at frame start) imaged at q.
Vec3 backproject_at_depth(const NormalizedPoint& q, double depth,
                          const MotionState& motion,
                          const CameraIntrinsics& K, const ShutterParams& s);

double line_line_distance(const Line3D& a, const Line3D& b);

}  // namespace rscam

#endif  // RSCAM_XSLIT_H_
