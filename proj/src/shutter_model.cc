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
#include "rscam/shutter_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Geometry>

#include "rscam/errors.h"

namespace rscam {

namespace {

constexpr double kMinDepth = 1e-12;
constexpr double kZero = 1e-15;

bool is_zero(double x) { return std::abs(x) <= kZero; }

// Camera-frame trajectory of a static point under the linearized camera,
// x(t0 + t) = origin + t * direction.
struct AffineTrack {
  Vec3 origin;
  Vec3 direction;
};

AffineTrack linear_track(const WorldPoint& X, const MotionState& m,
                         double frame_start) {
  const Vec3 rotated = m.pose0.rotation * X;
  const Vec3 direction =
      m.angular_velocity.cross(rotated) + m.linear_velocity;
  const Vec3 origin =
      rotated + m.pose0.translation + frame_start * direction;
  return {origin, direction};
}

Vec3 exact_camera_point(const WorldPoint& X, const MotionState& m,
                        double time) {
  return rotation_exp(m.angular_velocity, time) *
             (m.pose0.rotation * X) +
         m.pose0.translation + m.linear_velocity * time;
}

// Row coordinate (pixels) of a camera-frame point.
double pixel_row(const CameraIntrinsics& K, const Vec3& x_cam) {
  return (K.K()(1, 1) * x_cam.y() + K.K()(1, 2) * x_cam.z()) / x_cam.z();
}

struct Window {
  double lo;
  double hi;
};

Window frame_window(const CameraIntrinsics& K, const ShutterParams& s) {
  return {0.0, s.frame_duration(K.height())};
}

double window_slack(const Window& w) {
  return 1e-12 * std::max(1.0, w.hi - w.lo);
}

double distance_to_window(double t, const Window& w) {
  if (t < w.lo) return w.lo - t;
  if (t > w.hi) return t - w.hi;
  return 0.0;
}

// Picks the scan time among candidate roots: the earliest in the window, or
// (without window enforcement) the one closest to it.
ScanTime pick_root(std::vector<double> roots, const Window& w,
                   bool enforce_window) {
  std::sort(roots.begin(), roots.end());
  const double slack = window_slack(w);
  std::vector<double> inside;
  for (double t : roots) {
    if (t >= w.lo - slack && t <= w.hi + slack) inside.push_back(t);
  }
  if (!inside.empty()) {
    return {std::clamp(inside.front(), w.lo, w.hi), inside.size() > 1};
  }
  if (enforce_window || roots.empty()) {
    throw NoScanTime("no scanline captures the point in this frame");
  }
  const auto best = std::min_element(
      roots.begin(), roots.end(), [&](double a, double b) {
        return distance_to_window(a, w) < distance_to_window(b, w);
      });
  return {*best, false};
}

// Rolling-shutter constraint for the linearized camera,
//   (a + b t) = (r t - v0)(cz + e t),  a = K_1 . origin, b = K_1 . direction,
// i.e. r e t^2 + (r cz - v0 e - b) t - (v0 cz + a) = 0.
struct LinearizedConstraint {
  double a, b, cz, e, rate, first_row;

  double quadratic() const { return rate * e; }
  double linear() const { return rate * cz - first_row * e - b; }
  double constant() const { return -(first_row * cz + a); }

  double depth(double t) const { return cz + e * t; }
  double residual(double t) const {
    return (a + b * t) / depth(t) - (rate * t - first_row);
  }
  double derivative(double t) const {
    const double d = depth(t);
    return (b * cz - a * e) / (d * d) - rate;
  }
};

LinearizedConstraint make_constraint(const WorldPoint& X,
                                     const MotionState& m,
                                     const CameraIntrinsics& K,
                                     const ShutterParams& s,
                                     double frame_start) {
  const AffineTrack track = linear_track(X, m, frame_start);
  const Eigen::RowVector3d k1 = K.K().row(1);
  return {k1.dot(track.origin), k1.dot(track.direction), track.origin.z(),
          track.direction.z(), s.scan_rate, s.first_row};
}

double polish(const LinearizedConstraint& c, double t) {
  for (int i = 0; i < 2; ++i) {
    const double d = c.derivative(t);
    if (d == 0.0 || !std::isfinite(d)) break;
    t -= c.residual(t) / d;
  }
  return t;
}

ScanTime solve_linear(const LinearizedConstraint& c, const Window& w,
                      bool enforce_window) {
  if (!is_zero(c.e)) {
    throw std::invalid_argument(
        "linear scan-time case requires zero depth velocity");
  }
  if (c.cz <= kMinDepth) throw NegativeDepth("point is behind the camera");
  const double B = c.linear();
  if (B == 0.0) throw Singularity("point moves with the scanline");
  return pick_root({-c.constant() / B}, w, enforce_window);
}

ScanTime solve_quadratic(const LinearizedConstraint& c, const Window& w,
                         bool enforce_window) {
  const double A = c.quadratic();
  const double B = c.linear();
  const double C = c.constant();
  std::vector<double> roots;
  const double span = std::max(1.0, w.hi - w.lo);
  if (std::abs(A) * span * span <=
      1e-14 * (std::abs(B) * span + std::abs(C))) {
    if (B == 0.0) throw NoScanTime("degenerate scan-time equation");
    roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw NoScanTime("scan-time equation has no real root");
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    if (q != 0.0) {
      roots.push_back(q / A);
      roots.push_back(C / q);
    } else {
      roots.push_back(0.0);
    }
  }

  std::vector<double> valid;
  bool behind = false;
  for (double t : roots) {
    if (!std::isfinite(t)) continue;
    if (c.depth(t) <= kMinDepth) {
      behind = true;
      continue;
    }
    valid.push_back(polish(c, t));
  }
  if (valid.empty() && behind) {
    throw NegativeDepth("point crosses the camera plane");
  }
  return pick_root(std::move(valid), w, enforce_window);
}

ScanTime solve_nonlinear(const WorldPoint& X, const MotionState& m,
                         const CameraIntrinsics& K, const ShutterParams& s,
                         const ScanOptions& options, const Window& w) {
  const double width = w.hi - w.lo;
  Window search = w;
  if (!options.enforce_window) search = {w.lo - width, w.hi + width};

  auto residual = [&](double t) {
    const Vec3 x = exact_camera_point(X, m, options.frame_start + t);
    if (x.z() <= kMinDepth) {
      throw NegativeDepth("point crosses the camera plane");
    }
    return pixel_row(K, x) - (s.scan_rate * t - s.first_row);
  };

  const int n = std::max(options.bracket_samples, 2) *
                (options.enforce_window ? 1 : 3);
  std::vector<double> ts(n + 1);
  std::vector<double> fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = search.lo + (search.hi - search.lo) * i / n;
    fs[i] = residual(ts[i]);
  }

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0) {
      roots.push_back(ts[i]);
      continue;
    }
    if ((fs[i] < 0.0) == (fs[i + 1] < 0.0) || fs[i + 1] == 0.0) continue;
    double lo = ts[i], hi = ts[i + 1];
    double flo = fs[i];
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fmid = residual(mid);
      if (fmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fmid < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  if (fs[n] == 0.0) roots.push_back(ts[n]);
  return pick_root(std::move(roots), w, options.enforce_window);
}

}  // namespace

ShutterParams ShutterParams::ForFramerate(double framerate, int n_rows) {
  ShutterParams s;
  s.framerate = framerate;
  s.scan_rate = n_rows * framerate;
  return s;
}

double ShutterParams::frame_duration(int n_rows) const {
  return n_rows / std::abs(scan_rate);
}

double ShutterParams::frame_start(int frame_index) const {
  return frame_index * (1.0 / framerate + frame_delay);
}

void ShutterParams::validate(int n_rows) const {
  if (!std::isfinite(scan_rate) || scan_rate == 0.0) {
    throw std::invalid_argument("scan rate must be finite and nonzero");
  }
  if (!(framerate > 0.0) || !std::isfinite(framerate)) {
    throw std::invalid_argument("framerate must be positive");
  }
  if (!(frame_delay >= 0.0) || !(row_exposure >= 0.0)) {
    throw std::invalid_argument("frame delay and exposure must be >= 0");
  }
  if (!std::isfinite(first_row)) {
    throw std::invalid_argument("first row must be finite");
  }
  if (frame_duration(n_rows) > (1.0 / framerate) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "frame scan duration n_rows / |r| exceeds the frame period");
  }
}

std::string_view to_string(ScanTimeCase c) {
  switch (c) {
    case ScanTimeCase::kFrontoParallelLinear:
      return "fronto_parallel_linear";
    case ScanTimeCase::kAxialQuadratic:
      return "axial_quadratic";
    case ScanTimeCase::kGeneralQuadratic:
      return "general_quadratic";
    case ScanTimeCase::kExactNonlinear:
      return "exact_nonlinear";
  }
  return "unknown";
}

NormalizedShutter normalize_shutter(const ShutterParams& s,
                                    const CameraIntrinsics& K) {
  const double sa = K.pixel_size();
  return {s.scan_rate * sa, (s.first_row + K.principal_row()) * sa};
}

double constraint_residual(const WorldPoint& X, const MotionState& motion,
                           const CameraIntrinsics& K, const ShutterParams& s,
                           double t, bool linearized, double frame_start) {
  const Mat34 P = camera_matrix_at(motion, K, frame_start + t, linearized);
  const PixelPoint q = project_perspective(X, P);
  return q.y() - (s.scan_rate * t - s.first_row);
}

ScanTimeCase classify_case(const MotionState& motion, bool exact) {
  if (exact) return ScanTimeCase::kExactNonlinear;
  const Vec3& v = motion.linear_velocity;
  const Vec3& w = motion.angular_velocity;
  if (is_zero(v.z()) && is_zero(w.x()) && is_zero(w.y())) {
    return ScanTimeCase::kFrontoParallelLinear;
  }
  if (is_zero(v.x()) && is_zero(v.y()) && w.cwiseAbs().maxCoeff() <= kZero) {
    return ScanTimeCase::kAxialQuadratic;
  }
  return ScanTimeCase::kGeneralQuadratic;
}

ScanTime solve_scan_time(const WorldPoint& X, const MotionState& motion,
                         const CameraIntrinsics& K, const ShutterParams& s,
                         ScanTimeCase method, const ScanOptions& options) {
  if (s.scan_rate == 0.0 || !std::isfinite(s.scan_rate)) {
    throw std::invalid_argument("scan rate must be finite and nonzero");
  }
  const Window w = frame_window(K, s);
  switch (method) {
    case ScanTimeCase::kFrontoParallelLinear:
      return solve_linear(make_constraint(X, motion, K, s, options.frame_start),
                          w, options.enforce_window);
    case ScanTimeCase::kAxialQuadratic:
    case ScanTimeCase::kGeneralQuadratic:
      return solve_quadratic(
          make_constraint(X, motion, K, s, options.frame_start), w,
          options.enforce_window);
    case ScanTimeCase::kExactNonlinear:
      return solve_nonlinear(X, motion, K, s, options, w);
  }
  throw std::invalid_argument("unknown scan-time case");
}

NormalizedPoint fronto_parallel_projection(const Vec3& point,
                                           const Vec2& velocity_xy,
                                           double omega_z, double rate,
                                           double first_row,
                                           double* scan_time,
                                           double threshold) {
  const double x = point.x(), y = point.y(), z = point.z();
  if (z <= kMinDepth) throw NegativeDepth("point is behind the camera");
  const double vx = velocity_xy.x(), vy = velocity_xy.y();
  const double denom = rate * z - vy - omega_z * x;
  if (std::abs(denom) < threshold) {
    throw Singularity("point moves with the scanline");
  }
  const double tc = (y + first_row * z) / denom;
  if (scan_time != nullptr) *scan_time = tc;
  return {x / z + tc * (vx - omega_z * y) / z,
          y / z + tc * (vy + omega_z * x) / z};
}

RsProjection project_rolling_shutter(const WorldPoint& X,
                                     const MotionState& motion,
                                     const CameraIntrinsics& K,
                                     const ShutterParams& s, bool exact,
                                     const ScanOptions& options) {
  if (s.scan_rate == 0.0 || !std::isfinite(s.scan_rate)) {
    throw std::invalid_argument("scan rate must be finite and nonzero");
  }
  const ScanTimeCase method = classify_case(motion, exact);
  RsProjection out;
  out.method = method;
  out.perspective = project_perspective(
      X, camera_matrix_at(motion, K, options.frame_start, !exact));

  if (method == ScanTimeCase::kFrontoParallelLinear) {
    // Canonical frame: the linearized track is origin + t * direction with
    // direction = (vx - wz y, vy + wz x, 0) evaluated at the origin.
    const AffineTrack track = linear_track(X, motion, options.frame_start);
    const double wz = motion.angular_velocity.z();
    const Vec3& c = track.origin;
    const Vec2 v_eff(track.direction.x() + wz * c.y(),
                     track.direction.y() - wz * c.x());
    const NormalizedShutter ns = normalize_shutter(s, K);
    double tc = 0.0;
    const NormalizedPoint q = fronto_parallel_projection(
        c, v_eff, wz, ns.rate, ns.first_row, &tc,
        options.singularity_threshold);
    const Window w = frame_window(K, s);
    out.scan_time = pick_root({tc}, w, options.enforce_window).time;
    out.pixel = K.to_pixel(q);
  } else {
    const ScanTime st = solve_scan_time(X, motion, K, s, method, options);
    out.scan_time = st.time;
    out.multiple_roots = st.multiple_roots;
    out.pixel = project_perspective(
        X, camera_matrix_at(motion, K, options.frame_start + st.time, !exact));
  }
  // A static camera images exactly like a pinhole; return that pixel rather
  // than one that differs from it by rounding.
  if (motion.linear_velocity.isZero(0.0) && motion.angular_velocity.isZero(0.0)) {
    out.pixel = out.perspective;
  }
  out.correction = out.pixel - out.perspective;
  return out;
}

double correction_magnitude(const WorldPoint& X, const MotionState& motion,
                            const CameraIntrinsics& K,
                            const ShutterParams& s) {
  return project_rolling_shutter(X, motion, K, s, false).correction.norm();
}

double limit_line(const ShutterParams& s, const CameraIntrinsics& K,
                  double v_y) {
  if (!(v_y >= 0.0)) throw std::invalid_argument("v_y must be >= 0");
  if (s.scan_rate == 0.0) {
    throw std::invalid_argument("scan rate must be nonzero");
  }
  const double frame_rate_of_scan = std::abs(s.scan_rate) / K.height();
  return v_y / (K.pixel_size() * frame_rate_of_scan);
}

double max_correction_on_plane(const MotionState& motion,
                               const CameraIntrinsics& K,
                               const ShutterParams& s, double depth,
                               int grid) {
  if (!(depth > 0.0)) throw std::invalid_argument("depth must be positive");
  grid = std::max(grid, 2);
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const PixelPoint p((K.width() - 1.0) * i / (grid - 1),
                         (K.height() - 1.0) * j / (grid - 1));
      const Vec3 x_cam = depth * K.to_normalized(p).homogeneous();
      const WorldPoint X = motion.pose0.to_world(x_cam);
      try {
        const RsProjection rs = project_rolling_shutter(X, motion, K, s, false);
        best = std::max(best, rs.correction.norm());
      } catch (const NoScanTime&) {
      }
    }
  }
  return best;
}

}  // namespace rscam
