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
#ifndef RSCAM_SHUTTER_MODEL_H_
#define RSCAM_SHUTTER_MODEL_H_

#include <string_view>

#include "rscam/geometry.h"

namespace rscam {

// Row readout timing. Within a frame starting at t0 the row being exposed is
//   v_cam(t0 + t) = scan_rate * t - first_row        (pixel rows)
// and frame k starts at k * (1 / framerate + frame_delay).
struct ShutterParams {
  double scan_rate = 1.0;     // rows / second, sign gives the scan direction
  double first_row = 0.0;     // v0
  double frame_delay = 0.0;   // seconds
  double framerate = 1.0;     // frames / second
  double row_exposure = 0.0;  // seconds, informational only

  // Rolling shutter whose readout fills the whole frame period:
  // scan_rate = n_rows * framerate.
  static ShutterParams ForFramerate(double framerate, int n_rows);

  double frame_duration(int n_rows) const;
  double frame_start(int frame_index) const;

  // Throws std::invalid_argument if r == 0, f <= 0, d < 0, e < 0 or the frame
  // scan does not fit in one frame period.
  void validate(int n_rows) const;
};

enum class ScanTimeCase {
  kFrontoParallelLinear,  // v = (vx, vy, 0), w = (0, 0, wz), linearized P
  kAxialQuadratic,        // v = (0, 0, vz), w = 0
  kGeneralQuadratic,      // any constant (v, w), linearized P
  kExactNonlinear,        // exact P(t), root finder
};

std::string_view to_string(ScanTimeCase c);

struct ScanOptions {
  // Absolute start time of the frame; scan times are relative to it.
  double frame_start = 0.0;
  // Reject roots outside [0, n_rows / |r|]. When false the root nearest to
  // the window is returned (used inside optimizers).
  bool enforce_window = true;
  // Closed-form denominator threshold (normalized units).
  double singularity_threshold = 1e-12;
  // Bracketing resolution of the nonlinear solver over the frame window.
  int bracket_samples = 64;
};

struct ScanTime {
  double time = 0.0;  // seconds after frame start
  // A second root lies in the frame window: the scanline caught the point
  // twice and the earlier capture was returned.
  bool multiple_roots = false;
};

struct RsProjection {
  PixelPoint pixel = PixelPoint::Zero();
  double scan_time = 0.0;  // seconds after frame start
  PixelPoint perspective = PixelPoint::Zero();  // q at frame start
  Vec2 correction = Vec2::Zero();               // pixel - perspective
  ScanTimeCase method = ScanTimeCase::kFrontoParallelLinear;
  bool multiple_roots = false;
};

// pi_y(P(t0 + t) X) - (r t - v0) in pixels. Throws DepthError if the point is
// on the camera plane at that time.
double constraint_residual(const WorldPoint& X, const MotionState& motion,
                           const CameraIntrinsics& K, const ShutterParams& s,
                           double t, bool linearized, double frame_start = 0.0);

ScanTimeCase classify_case(const MotionState& motion, bool exact = false);

// Earliest root of the rolling-shutter constraint in the frame window.
// Throws NoScanTime or NegativeDepth.
ScanTime solve_scan_time(const WorldPoint& X, const MotionState& motion,
                         const CameraIntrinsics& K, const ShutterParams& s,
                         ScanTimeCase method, const ScanOptions& options = {});

// Canonical-frame fronto-parallel projection (R = I, T = 0, K = I):
//   q = (x, y) / z + (y + v0 z) / (r z - vy - wz x) * (vx - wz y, vy + wz x) / z
// with r and v0 in normalized units. Writes the scan time if requested.
// Throws Singularity when |r z - vy - wz x| < threshold.
NormalizedPoint fronto_parallel_projection(const Vec3& point,
                                           const Vec2& velocity_xy,
                                           double omega_z, double rate,
                                           double first_row,
                                           double* scan_time = nullptr,
                                           double threshold = 1e-12);

// Image of X in a rolling-shutter frame. With exact = false the motion class
// selects the closed form (fronto-parallel) or the linearized quadratic; with
// exact = true the nonlinear constraint is solved with the exact P(t).
RsProjection project_rolling_shutter(const WorldPoint& X,
                                     const MotionState& motion,
                                     const CameraIntrinsics& K,
                                     const ShutterParams& s, bool exact,
                                     const ScanOptions& options = {});

// Norm of the rolling-shutter correction in pixels.
double correction_magnitude(const WorldPoint& X, const MotionState& motion,
                            const CameraIntrinsics& K, const ShutterParams& s);

// Depth beyond which the correction for vertical speed v_y stays below one
// pixel: z_min = v_y / (s_alpha * r_frame), where r_frame = |r| / n_rows is
// the scan rate in frame heights per second.
double limit_line(const ShutterParams& s, const CameraIntrinsics& K,
                  double v_y);

// Largest correction (pixels) over a grid x grid lattice of pixels whose
// rays, at frame start, hit the fronto-parallel plane at `depth` in front of
// the camera. Pixels not imaged in the frame are skipped.
double max_correction_on_plane(const MotionState& motion,
                               const CameraIntrinsics& K,
                               const ShutterParams& s, double depth,
                               int grid = 48);

// Shutter parameters expressed in the K = I frame.
struct NormalizedShutter {
  double rate;       // r * s_alpha
  double first_row;  // (v0 + c_y) * s_alpha
};
NormalizedShutter normalize_shutter(const ShutterParams& s,
                                    const CameraIntrinsics& K);

}  // namespace rscam

#endif  // RSCAM_SHUTTER_MODEL_H_
