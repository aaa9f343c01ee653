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
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

#include "rscam/errors.h"
#include "rscam/sfm.h"

namespace rscam {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr ProjectionModel kModels[] = {ProjectionModel::kRollingShutter,
                                       ProjectionModel::kPerspective};

struct Stats {
  double mean = 0.0, se = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) {
    s.mean = s.se = std::nan("");
    return s;
  }
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (xs.size() - 1.0) / xs.size());
  }
  return s;
}

// Runs job(i) for i in [0, n) on `threads` workers; the first exception (by
// index) is rethrown.
template <typename Job>
void parallel_for(int n, int threads, Job job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int k = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, int cell, int trial) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cell));
  return splitmix64(h ^ (static_cast<std::uint64_t>(trial) << 32));
}

ExperimentResult run_experiment_grid(const ExperimentConfig& config) {
  if (config.velocities_kmh.empty() || config.sigmas_px.empty()) {
    throw ConfigError("velocity and noise lists must be nonempty");
  }
  if (config.trials <= 0) throw ConfigError("trials must be positive");
  if (config.threads <= 0) throw ConfigError("threads must be positive");
  if (config.velocity_direction.norm() == 0.0) {
    throw ConfigError("velocity direction must be nonzero");
  }
  for (double s : config.sigmas_px) {
    if (!(s >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  }

  const int nv = static_cast<int>(config.velocities_kmh.size());
  const int ns = static_cast<int>(config.sigmas_px.size());
  const int n_cells = nv * ns;
  const int n_jobs = n_cells * config.trials;
  const Vec3 dir = config.velocity_direction.normalized();

  ExperimentResult result;
  result.trials.resize(static_cast<size_t>(n_jobs) * 2);
  parallel_for(n_jobs, config.threads, [&](int job) {
    const int cell = job / config.trials;
    const int trial = job % config.trials;
    SceneConfig scene = config.scene;
    scene.velocity_kmh = config.velocities_kmh[cell / ns] * dir;
    scene.noise_sigma = config.sigmas_px[cell % ns];
    const std::uint64_t seed = trial_seed(config.seed, cell, trial);
    const SfmProblem problem = generate_problem(scene, seed);
    const SfmEstimate init = make_initial_guess(problem, config.ba, seed);
    for (int m = 0; m < 2; ++m) {
      const SfmSolution sol = bundle_adjust(problem, kModels[m], config.ba,
                                            &init);
      TrialResult& t = result.trials[static_cast<size_t>(job) * 2 + m];
      t.cell = cell;
      t.trial = trial;
      t.model = kModels[m];
      t.metrics.reprojection_rms = sol.reprojection_rms;
      t.metrics.rotation_deg = sol.rotation_error_deg;
      t.metrics.translation_deg = sol.translation_error_deg;
      t.converged = sol.converged;
      t.iterations = sol.iterations;
    }
  });

  for (int cell = 0; cell < n_cells; ++cell) {
    for (int m = 0; m < 2; ++m) {
      std::vector<double> reproj, rot, trans;
      CellSummary s;
      s.velocity_kmh = config.velocities_kmh[cell / ns];
      s.sigma_px = config.sigmas_px[cell % ns];
      s.model = kModels[m];
      s.trials = config.trials;
      for (int trial = 0; trial < config.trials; ++trial) {
        const TrialResult& t =
            result.trials[(static_cast<size_t>(cell) * config.trials + trial) *
                              2 +
                          m];
        reproj.push_back(t.metrics.reprojection_rms);
        rot.push_back(t.metrics.rotation_deg);
        if (t.metrics.translation_deg) trans.push_back(*t.metrics.translation_deg);
        if (!t.converged) ++s.nonconverged_count;
      }
      const Stats a = stats(reproj), b = stats(rot), c = stats(trans);
      s.mean_reproj_px = a.mean;
      s.se_reproj = a.se;
      s.mean_rot_deg = b.mean;
      s.se_rot = b.se;
      s.mean_trans_deg = c.mean;
      s.se_trans = c.se;
      result.cells.push_back(s);
    }
  }
  return result;
}

std::string results_csv(const ExperimentResult& result) {
  std::string out =
      "velocity_kmh,sigma_px,model,trials,mean_reproj_px,se_reproj,"
      "mean_rot_deg,se_rot,mean_trans_deg,se_trans,nonconverged_count\n";
  char buf[512];
  for (const CellSummary& s : result.cells) {
    std::snprintf(buf, sizeof(buf),
                  "%.10g,%.10g,%s,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n",
                  s.velocity_kmh, s.sigma_px,
                  std::string(to_string(s.model)).c_str(), s.trials,
                  s.mean_reproj_px, s.se_reproj, s.mean_rot_deg, s.se_rot,
                  s.mean_trans_deg, s.se_trans, s.nonconverged_count);
    out += buf;
  }
  return out;
}

const CellSummary& find_cell(const ExperimentResult& result,
                             double velocity_kmh, double sigma_px,
                             ProjectionModel model) {
  for (const CellSummary& s : result.cells) {
    if (std::abs(s.velocity_kmh - velocity_kmh) < 1e-9 &&
        std::abs(s.sigma_px - sigma_px) < 1e-9 && s.model == model) {
      return s;
    }
  }
  throw std::out_of_range("no such experiment cell");
}

}  // namespace rscam
