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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "rscam/errors.h"
#include "rscam/sfm.h"

namespace rscam {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

// Camera at `centre` looking at `target`, image y axis roughly along world
// +y, rolled by `roll` radians about its optical axis.
Pose look_at(const Vec3& centre, const Vec3& target, double roll) {
  const Vec3 z = (target - centre).normalized();
  const Vec3 x = Vec3::UnitY().cross(z).normalized();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.row(0) = x;
  R.row(1) = y;
  R.row(2) = z;
  R = rotation_exp(Vec3::UnitZ(), roll).matrix() * R;
  Pose pose;
  pose.rotation = Rotation::Orthonormalized(R);
  pose.translation = -(pose.rotation * centre);
  return pose;
}

std::optional<PixelPoint> image_point(const CameraState& cam,
                                      const WorldPoint& X,
                                      ProjectionModel model) {
  try {
    PixelPoint p;
    if (model == ProjectionModel::kRollingShutter) {
      p = project_rolling_shutter(X, cam.motion, cam.intrinsics, cam.shutter,
                                  false)
              .pixel;
    } else {
      const Vec3 xc = cam.motion.pose0.to_camera(X);
      if (xc.z() <= 0.0) return std::nullopt;
      p = project_perspective(
          X, camera_matrix_at(cam.motion, cam.intrinsics, 0.0, true));
    }
    if (!cam.intrinsics.contains(p)) return std::nullopt;
    return p;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Linear (DLT) triangulation from perspective cameras.
WorldPoint triangulate(const std::vector<Mat34>& Ps,
                       const std::vector<PixelPoint>& pixels) {
  Eigen::MatrixXd A(2 * Ps.size(), 4);
  for (size_t i = 0; i < Ps.size(); ++i) {
    A.row(2 * i) = pixels[i].x() * Ps[i].row(2) - Ps[i].row(0);
    A.row(2 * i + 1) = pixels[i].y() * Ps[i].row(2) - Ps[i].row(1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Vec4 X = svd.matrixV().col(3);
  return X.head<3>() / X(3);
}

}  // namespace

std::string_view to_string(ProjectionModel model) {
  return model == ProjectionModel::kRollingShutter ? "rolling_shutter"
                                                   : "perspective";
}

ProjectionModel projection_model_from_string(std::string_view name) {
  if (name == "rolling_shutter" || name == "rs") {
    return ProjectionModel::kRollingShutter;
  }
  if (name == "perspective" || name == "pinhole") {
    return ProjectionModel::kPerspective;
  }
  throw std::invalid_argument("unknown projection model: " +
                              std::string(name));
}

Vec2 reprojection_residual(const CameraState& camera, const WorldPoint& X,
                           const PixelPoint& observed, ProjectionModel model) {
  if (model == ProjectionModel::kRollingShutter) {
    ScanOptions opts;
    opts.enforce_window = false;
    return project_rolling_shutter(X, camera.motion, camera.intrinsics,
                                   camera.shutter, false, opts)
               .pixel -
           observed;
  }
  return project_perspective(
             X, camera_matrix_at(camera.motion, camera.intrinsics, 0.0, true)) -
         observed;
}

SfmProblem generate_problem(const SceneConfig& config, std::uint64_t seed,
                            ProjectionModel generating_model) {
  if (config.num_points <= 0 || config.num_cameras < 2) {
    throw ConfigError("need at least one point and two cameras");
  }
  if (!(config.baseline_min > 0.0) ||
      config.baseline_max < config.baseline_min) {
    throw ConfigError("invalid baseline range");
  }
  if (!(config.noise_sigma >= 0.0)) {
    throw ConfigError("noise sigma must be >= 0");
  }

  std::mt19937_64 rng = make_rng(seed, 0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const CameraIntrinsics K = CameraIntrinsics::FromFieldOfView(
      config.width, config.height, config.hfov_deg);
  ShutterParams shutter =
      ShutterParams::ForFramerate(config.framerate, config.height);
  shutter.first_row = config.first_row;
  shutter.frame_delay = config.frame_delay;

  SfmProblem problem;
  problem.seed = seed;
  problem.noise_sigma = config.noise_sigma;
  problem.generating_model = generating_model;

  const Vec3 cloud_centre(0.0, 0.0, config.cloud_distance);
  for (int c = 0; c < config.num_cameras; ++c) {
    CameraState cam;
    cam.intrinsics = K;
    cam.shutter = shutter;
    if (c > 0) {
      // Same distance to the cloud centre as camera 0, rotated about the
      // centre by the angle whose chord is the drawn baseline.
      std::uniform_real_distribution<double> len(config.baseline_min,
                                                 config.baseline_max);
      const double baseline = len(rng);
      const double dist = config.cloud_distance;
      if (baseline >= 2.0 * dist) throw ConfigError("baseline too long");
      const double angle = 2.0 * std::asin(0.5 * baseline / dist);
      const double phi = std::numbers::pi * unit(rng);
      const Vec3 axis(std::cos(phi), std::sin(phi), 0.0);
      const Vec3 centre =
          cloud_centre + rotation_exp(axis, angle) * Vec3(0.0, 0.0, -dist);
      cam.motion.pose0 =
          look_at(centre, cloud_centre, config.max_roll_deg * kDeg * unit(rng));
    }
    cam.motion.linear_velocity = config.velocity_kmh / 3.6;
    cam.motion.angular_velocity = config.angular_velocity;
    problem.cameras.push_back(cam);
  }

  const int max_attempts = 200 * config.num_points;
  std::vector<std::vector<PixelPoint>> clean(config.num_cameras);
  for (int attempt = 0; attempt < max_attempts &&
                        static_cast<int>(problem.points.size()) <
                            config.num_points;
       ++attempt) {
    const WorldPoint X =
        cloud_centre + 0.5 * config.cloud_size *
                           Vec3(unit(rng), unit(rng), unit(rng));
    std::vector<PixelPoint> seen;
    for (const CameraState& cam : problem.cameras) {
      const auto p = image_point(cam, X, generating_model);
      if (!p) break;
      seen.push_back(*p);
    }
    if (static_cast<int>(seen.size()) != config.num_cameras) continue;
    problem.points.push_back(X);
    for (int c = 0; c < config.num_cameras; ++c) clean[c].push_back(seen[c]);
  }
  if (static_cast<int>(problem.points.size()) < config.min_common_points) {
    throw ConfigError("fewer than " +
                      std::to_string(config.min_common_points) +
                      " points are visible in every view");
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  problem.observations.resize(config.num_cameras);
  for (int c = 0; c < config.num_cameras; ++c) {
    for (size_t j = 0; j < problem.points.size(); ++j) {
      Observation obs;
      obs.point = static_cast<int>(j);
      obs.pixel = clean[c][j];
      if (config.noise_sigma > 0.0) {
        const double nx = noise(rng);
        const double ny = noise(rng);
        obs.pixel += config.noise_sigma * Vec2(nx, ny);
      }
      problem.observations[c].push_back(obs);
    }
  }
  return problem;
}

SfmEstimate make_initial_guess(const SfmProblem& problem,
                               const BundleAdjustOptions& options,
                               std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, 0x1417);
  SfmEstimate est;
  for (size_t c = 0; c < problem.cameras.size(); ++c) {
    const MotionState& truth = problem.cameras[c].motion;
    Pose pose = truth.pose0;
    if (c > 0) {
      const Vec3 axis = random_unit(rng);
      pose.rotation = rotation_exp(axis, options.init_rotation_deg * kDeg) *
                      truth.pose0.rotation;
      const double baseline = truth.pose0.translation.norm();
      Vec3 t = truth.pose0.translation +
               options.init_translation_fraction * baseline * random_unit(rng);
      if (t.norm() > 0.0) t *= baseline / t.norm();
      pose.translation = t;
    }
    est.poses.push_back(pose);
    est.linear_velocities.push_back(truth.linear_velocity);
    est.angular_velocities.push_back(truth.angular_velocity);
  }

  std::vector<Mat34> Ps;
  for (size_t c = 0; c < problem.cameras.size(); ++c) {
    MotionState m;
    m.pose0 = est.poses[c];
    Ps.push_back(camera_matrix_at(m, problem.cameras[c].intrinsics, 0.0, true));
  }
  std::vector<std::vector<PixelPoint>> per_point(problem.points.size());
  std::vector<std::vector<Mat34>> per_point_P(problem.points.size());
  for (size_t c = 0; c < problem.observations.size(); ++c) {
    for (const Observation& obs : problem.observations[c]) {
      per_point[obs.point].push_back(obs.pixel);
      per_point_P[obs.point].push_back(Ps[c]);
    }
  }
  est.points.resize(problem.points.size());
  for (size_t j = 0; j < problem.points.size(); ++j) {
    if (per_point[j].size() < 2) {
      throw ConfigError("point " + std::to_string(j) +
                        " is observed by fewer than two cameras");
    }
    est.points[j] = triangulate(per_point_P[j], per_point[j]);
  }
  return est;
}

ErrorMetrics error_metrics(const SfmProblem& truth, const SfmSolution& est) {
  ErrorMetrics m;
  m.reprojection_rms = est.reprojection_rms;
  const size_t n = truth.cameras.size();
  if (n < 2 || est.estimate.poses.size() != n) {
    throw std::invalid_argument("estimate does not match the problem");
  }
  double rot = 0.0, trans = 0.0;
  int trans_count = 0;
  for (size_t c = 1; c < n; ++c) {
    const Pose& t0 = truth.cameras[c].motion.pose0;
    const Pose& te = est.estimate.poses[c];
    const Rotation delta = t0.rotation.inverse() * te.rotation;
    rot += rotation_log(delta).norm() / kDeg;

    const double a = te.translation.norm();
    const double b = t0.translation.norm();
    if (a > 1e-12 && b > 1e-12) {
      // atan2 keeps full precision near 0 and 180 degrees, unlike acos.
      trans += std::atan2(te.translation.cross(t0.translation).norm(),
                          te.translation.dot(t0.translation)) /
               kDeg;
      ++trans_count;
    }
  }
  m.rotation_deg = rot / static_cast<double>(n - 1);
  if (trans_count > 0) m.translation_deg = trans / trans_count;
  return m;
}

}  // namespace rscam
