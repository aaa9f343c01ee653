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
#ifndef RSCAM_SFM_H_
#define RSCAM_SFM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rscam/geometry.h"
#include "rscam/shutter_model.h"

namespace rscam {

enum class ProjectionModel { kRollingShutter, kPerspective };

std::string_view to_string(ProjectionModel model);
// Accepts "rolling_shutter" / "rs" and "perspective" / "pinhole".
ProjectionModel projection_model_from_string(std::string_view name);

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

struct CameraState {
  MotionState motion;
  CameraIntrinsics intrinsics;
  ShutterParams shutter;
};

struct Observation {
  int point = 0;
  PixelPoint pixel = PixelPoint::Zero();
};

// Synthetic scene. Camera 0 sits at the world origin looking down +z; the
// point cloud is a cube centred on its optical axis. The other cameras lie at
// the same distance from the cloud centre, a random baseline away from
// camera 0, and are aimed at the cloud centre.
struct SceneConfig {
  int num_points = 100;
  int num_cameras = 2;
  int width = 640;
  int height = 480;
  double hfov_deg = 40.0;
  double framerate = 15.0;
  double first_row = 0.0;
  double frame_delay = 0.0;
  double cloud_distance = 10.0;  // meters
  double cloud_size = 4.0;       // cube edge, meters
  double baseline_min = 3.0;     // meters, chord between camera centres
  double baseline_max = 6.0;
  double max_roll_deg = 5.0;
  Vec3 velocity_kmh = Vec3::Zero();      // camera frame, every camera
  Vec3 angular_velocity = Vec3::Zero();  // rad / s, camera frame
  double noise_sigma = 0.0;              // pixels, per coordinate
  int min_common_points = 8;
};

struct SfmProblem {
  std::vector<WorldPoint> points;
  std::vector<CameraState> cameras;
  std::vector<std::vector<Observation>> observations;  // per camera
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  ProjectionModel generating_model = ProjectionModel::kRollingShutter;
};

// Deterministic in (config, seed). Observations come from the generating
// model plus i.i.d. Gaussian pixel noise. Throws ConfigError when fewer than
// config.min_common_points points are imaged by every camera.
SfmProblem generate_problem(
    const SceneConfig& config, std::uint64_t seed,
    ProjectionModel generating_model = ProjectionModel::kRollingShutter);

// Parameters being refined. Camera 0 is the gauge reference.
struct SfmEstimate {
  std::vector<Pose> poses;
  std::vector<Vec3> linear_velocities;
  std::vector<Vec3> angular_velocities;
  std::vector<WorldPoint> points;
};

struct BundleAdjustOptions {
  // Refine per-camera (v, w) as well; otherwise they are known inputs.
  bool estimate_velocities = false;
  // Initialization: ground truth perturbed by a random rotation of this
  // angle and a translation offset of this fraction of the baseline.
  double init_rotation_deg = 2.0;
  double init_translation_fraction = 0.02;
  int max_iterations = 200;
  double relative_cost_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  double initial_lambda = 1e-3;
};

// Perturbed poses, true velocities and linearly triangulated points.
SfmEstimate make_initial_guess(const SfmProblem& problem,
                               const BundleAdjustOptions& options,
                               std::uint64_t seed);

struct SfmSolution {
  SfmEstimate estimate;
  ProjectionModel model = ProjectionModel::kRollingShutter;
  double reprojection_rms = 0.0;  // pixels, after optimization
  double rotation_error_deg = 0.0;
  std::optional<double> translation_error_deg;
  int iterations = 0;
  bool converged = false;
  std::string termination;
  std::vector<double> cost_history;  // sum of squared residuals, accepted
};

// Levenberg-Marquardt on the summed squared pixel residuals with a Schur
// complement over the points. Camera 0 is frozen and the length of every
// other camera translation is held at its initial value. When `initial` is
// null the initial guess is derived from problem.seed.
SfmSolution bundle_adjust(const SfmProblem& problem, ProjectionModel model,
                          const BundleAdjustOptions& options = {},
                          const SfmEstimate* initial = nullptr);

// Residual (predicted - observed) of one observation under `model`.
Vec2 reprojection_residual(const CameraState& camera, const WorldPoint& X,
                           const PixelPoint& observed, ProjectionModel model);

struct ErrorMetrics {
  double rotation_deg = 0.0;                 // mean over cameras 1..n-1
  std::optional<double> translation_deg;     // direction angle
  double reprojection_rms = 0.0;
};

// |log(R0^T R_est)| and the angle between t_est and t0, in degrees, against
// the generating cameras, averaged over the non-reference cameras.
ErrorMetrics error_metrics(const SfmProblem& truth, const SfmSolution& est);

// Experiment grid over speed and noise.
struct ExperimentConfig {
  SceneConfig scene;
  Vec3 velocity_direction = Vec3::UnitY();
  std::vector<double> velocities_kmh{1.875, 3.75, 5.625, 7.5};
  std::vector<double> sigmas_px{0.5, 1.33, 2.16, 3.0, 3.83, 4.66};
  int trials = 20;
  std::uint64_t seed = 1;
  BundleAdjustOptions ba;
  int threads = 1;
};

struct TrialResult {
  int cell = 0;
  int trial = 0;
  ProjectionModel model = ProjectionModel::kRollingShutter;
  ErrorMetrics metrics;
  bool converged = false;
  int iterations = 0;
};

struct CellSummary {
  double velocity_kmh = 0.0;
  double sigma_px = 0.0;
  ProjectionModel model = ProjectionModel::kRollingShutter;
  int trials = 0;
  double mean_reproj_px = 0.0, se_reproj = 0.0;
  double mean_rot_deg = 0.0, se_rot = 0.0;
  double mean_trans_deg = 0.0, se_trans = 0.0;
  int nonconverged_count = 0;
};

struct ExperimentResult {
  std::vector<CellSummary> cells;  // velocity-major, then sigma, then model
  std::vector<TrialResult> trials;
};

// Seed of one trial, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t seed, int cell, int trial);

ExperimentResult run_experiment_grid(const ExperimentConfig& config);

// Results table:
// velocity_kmh,sigma_px,model,trials,mean_reproj_px,se_reproj,mean_rot_deg,
// se_rot,mean_trans_deg,se_trans,nonconverged_count
std::string results_csv(const ExperimentResult& result);

const CellSummary& find_cell(const ExperimentResult& result,
                             double velocity_kmh, double sigma_px,
                             ProjectionModel model);

}  // namespace rscam

#endif  // RSCAM_SFM_H_
