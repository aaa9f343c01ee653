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
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "rscam/errors.h"
#include "rscam/sfm.h"

namespace rscam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-camera block of the parameter vector. Camera 0 carries no pose
// parameters; the others carry a rotation increment (3) and a step of the
// translation direction on the sphere of fixed radius (2). Velocities add
// (v, w) for every camera.
struct Layout {
  std::vector<int> offset;
  std::vector<int> pose_dim;
  std::vector<int> dim;
  int total = 0;
};

Layout make_layout(size_t n_cams, bool velocities) {
  Layout l;
  for (size_t c = 0; c < n_cams; ++c) {
    const int pose = c == 0 ? 0 : 5;
    const int d = pose + (velocities ? 6 : 0);
    l.offset.push_back(l.total);
    l.pose_dim.push_back(pose);
    l.dim.push_back(d);
    l.total += d;
  }
  return l;
}

// Orthonormal basis of the plane orthogonal to t.
void tangent_basis(const Vec3& t, Vec3* b1, Vec3* b2) {
  const Vec3 n = t.normalized();
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  *b1 = n.cross(seed).normalized();
  *b2 = n.cross(*b1);
}

Pose retract_pose(const Pose& pose, const double* delta) {
  Pose out;
  out.rotation =
      rotation_exp(Vec3(delta[0], delta[1], delta[2]), 1.0) * pose.rotation;
  const double radius = pose.translation.norm();
  if (radius > 0.0) {
    Vec3 b1, b2;
    tangent_basis(pose.translation, &b1, &b2);
    const Vec3 t = pose.translation + radius * (delta[3] * b1 + delta[4] * b2);
    out.translation = radius * t.normalized();
  } else {
    out.translation = pose.translation;
  }
  return out;
}

class Problem {
 public:
  Problem(const SfmProblem& p, ProjectionModel model, bool velocities)
      : p_(p),
        model_(model),
        velocities_(velocities),
        layout_(make_layout(p.cameras.size(), velocities)) {}

  const Layout& layout() const { return layout_; }
  size_t num_observations() const {
    size_t n = 0;
    for (const auto& obs : p_.observations) n += obs.size();
    return n;
  }

  CameraState camera(const SfmEstimate& est, size_t c,
                     const double* delta) const {
    CameraState cam = p_.cameras[c];
    Pose pose = est.poses[c];
    Vec3 v = est.linear_velocities[c];
    Vec3 w = est.angular_velocities[c];
    if (delta != nullptr) {
      if (layout_.pose_dim[c] > 0) pose = retract_pose(pose, delta);
      if (velocities_) {
        const double* dv = delta + layout_.pose_dim[c];
        v += Vec3(dv[0], dv[1], dv[2]);
        w += Vec3(dv[3], dv[4], dv[5]);
      }
    }
    cam.motion.pose0 = pose;
    cam.motion.linear_velocity = v;
    cam.motion.angular_velocity = w;
    return cam;
  }

  Vec2 residual(const CameraState& cam, const WorldPoint& X,
                const PixelPoint& obs) const {
    return reprojection_residual(cam, X, obs, model_);
  }

  // Sum of squared residuals; +inf if any residual cannot be evaluated.
  double cost(const SfmEstimate& est) const {
    double sum = 0.0;
    try {
      for (size_t c = 0; c < p_.cameras.size(); ++c) {
        const CameraState cam = camera(est, c, nullptr);
        for (const Observation& o : p_.observations[c]) {
          sum += residual(cam, est.points[o.point], o.pixel).squaredNorm();
        }
      }
    } catch (const Error&) {
      return kInf;
    }
    return std::isfinite(sum) ? sum : kInf;
  }

  // Normal equations in block form: U (cameras), W_j (camera x point),
  // V_j (point), gradients g_c and g_j.
  struct Normal {
    Eigen::MatrixXd U;
    Eigen::VectorXd gc;
    std::vector<Eigen::MatrixXd> W;
    std::vector<Mat3> V;
    std::vector<Vec3> gp;
  };

  Normal linearize(const SfmEstimate& est) const {
    const int D = layout_.total;
    const size_t np = est.points.size();
    Normal n;
    n.U = Eigen::MatrixXd::Zero(D, D);
    n.gc = Eigen::VectorXd::Zero(D);
    n.W.assign(np, Eigen::MatrixXd::Zero(D, 3));
    n.V.assign(np, Mat3::Zero());
    n.gp.assign(np, Vec3::Zero());

    for (size_t c = 0; c < p_.cameras.size(); ++c) {
      const int off = layout_.offset[c];
      const int dim = layout_.dim[c];
      const CameraState cam0 = camera(est, c, nullptr);
      // Cameras perturbed along each of their parameters.
      std::vector<CameraState> plus, minus;
      std::vector<double> steps;
      for (int k = 0; k < dim; ++k) {
        std::vector<double> d(dim, 0.0);
        const double h = 1e-6;
        d[k] = h;
        plus.push_back(camera(est, c, d.data()));
        d[k] = -h;
        minus.push_back(camera(est, c, d.data()));
        steps.push_back(h);
      }
      for (const Observation& o : p_.observations[c]) {
        const WorldPoint& X = est.points[o.point];
        const Vec2 r = residual(cam0, X, o.pixel);
        Eigen::Matrix<double, 2, Eigen::Dynamic> Jc(2, dim);
        for (int k = 0; k < dim; ++k) {
          Jc.col(k) = (residual(plus[k], X, o.pixel) -
                       residual(minus[k], X, o.pixel)) /
                      (2.0 * steps[k]);
        }
        Eigen::Matrix<double, 2, 3> Jp;
        const double hp = 1e-6 * std::max(1.0, X.norm());
        for (int k = 0; k < 3; ++k) {
          Vec3 dx = Vec3::Zero();
          dx(k) = hp;
          Jp.col(k) = (residual(cam0, X + dx, o.pixel) -
                       residual(cam0, X - dx, o.pixel)) /
                      (2.0 * hp);
        }
        const int j = o.point;
        n.U.block(off, off, dim, dim) += Jc.transpose() * Jc;
        n.gc.segment(off, dim) += Jc.transpose() * r;
        n.W[j].middleRows(off, dim) += Jc.transpose() * Jp;
        n.V[j] += Jp.transpose() * Jp;
        n.gp[j] += Jp.transpose() * r;
      }
    }
    return n;
  }

  SfmEstimate apply(const SfmEstimate& est, const Eigen::VectorXd& dc,
                    const std::vector<Vec3>& dp) const {
    SfmEstimate out = est;
    for (size_t c = 0; c < p_.cameras.size(); ++c) {
      if (layout_.dim[c] == 0) continue;
      const CameraState cam = camera(est, c, dc.data() + layout_.offset[c]);
      out.poses[c] = cam.motion.pose0;
      out.linear_velocities[c] = cam.motion.linear_velocity;
      out.angular_velocities[c] = cam.motion.angular_velocity;
    }
    for (size_t j = 0; j < out.points.size(); ++j) out.points[j] += dp[j];
    return out;
  }

 private:
  const SfmProblem& p_;
  ProjectionModel model_;
  bool velocities_;
  Layout layout_;
};

double damped(double d, double lambda) {
  return d + lambda * std::max(d, 1e-9);
}

// Solves the damped normal equations via the Schur complement on the
// cameras. Returns false when the reduced system is not positive definite.
bool solve_step(const Problem::Normal& n, double lambda, Eigen::VectorXd* dc,
                std::vector<Vec3>* dp) {
  const int D = static_cast<int>(n.gc.size());
  const size_t np = n.V.size();
  Eigen::MatrixXd S = n.U;
  for (int i = 0; i < D; ++i) S(i, i) = damped(n.U(i, i), lambda);
  Eigen::VectorXd rhs = -n.gc;

  std::vector<Mat3> Vinv(np);
  for (size_t j = 0; j < np; ++j) {
    Mat3 V = n.V[j];
    for (int i = 0; i < 3; ++i) V(i, i) = damped(n.V[j](i, i), lambda);
    Eigen::FullPivLU<Mat3> lu(V);
    if (!lu.isInvertible()) return false;
    Vinv[j] = lu.inverse();
    if (D > 0) {
      const Eigen::MatrixXd WV = n.W[j] * Vinv[j];
      S.noalias() -= WV * n.W[j].transpose();
      rhs.noalias() += WV * n.gp[j];
    }
  }

  *dc = Eigen::VectorXd::Zero(D);
  if (D > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    *dc = ldlt.solve(rhs);
    if (!dc->allFinite()) return false;
  }
  dp->resize(np);
  for (size_t j = 0; j < np; ++j) {
    Vec3 b = -n.gp[j];
    if (D > 0) b -= n.W[j].transpose() * *dc;
    (*dp)[j] = Vinv[j] * b;
    if (!(*dp)[j].allFinite()) return false;
  }
  return true;
}

double gradient_norm(const Problem::Normal& n) {
  double g = n.gc.size() > 0 ? n.gc.cwiseAbs().maxCoeff() : 0.0;
  for (const Vec3& v : n.gp) g = std::max(g, v.cwiseAbs().maxCoeff());
  return g;
}

}  // namespace

SfmSolution bundle_adjust(const SfmProblem& problem, ProjectionModel model,
                          const BundleAdjustOptions& options,
                          const SfmEstimate* initial) {
  if (problem.cameras.size() < 2 ||
      problem.observations.size() != problem.cameras.size()) {
    throw std::invalid_argument("bundle adjustment needs >= 2 cameras");
  }
  if (options.max_iterations < 0) {
    throw std::invalid_argument("max_iterations must be >= 0");
  }

  SfmSolution sol;
  sol.model = model;
  sol.estimate = initial != nullptr
                     ? *initial
                     : make_initial_guess(problem, options, problem.seed);
  const size_t nc = problem.cameras.size();
  if (sol.estimate.poses.size() != nc ||
      sol.estimate.linear_velocities.size() != nc ||
      sol.estimate.angular_velocities.size() != nc ||
      sol.estimate.points.size() != problem.points.size()) {
    throw std::invalid_argument("initial estimate does not match problem");
  }

  // Velocities do not enter the pin-hole model.
  const bool velocities =
      options.estimate_velocities && model == ProjectionModel::kRollingShutter;
  const Problem prob(problem, model, velocities);
  const double n_obs = static_cast<double>(prob.num_observations());

  double cost = prob.cost(sol.estimate);
  if (!std::isfinite(cost)) {
    sol.termination = "initial residuals could not be evaluated";
    sol.reprojection_rms = kInf;
    sol.rotation_error_deg = kInf;
    return sol;
  }
  sol.cost_history.push_back(cost);

  double lambda = options.initial_lambda;
  sol.termination = "maximum iterations reached";
  while (sol.iterations < options.max_iterations) {
    if (cost == 0.0) {
      sol.converged = true;
      sol.termination = "zero cost";
      break;
    }
    Problem::Normal normal;
    try {
      normal = prob.linearize(sol.estimate);
    } catch (const Error&) {
      sol.termination = "Jacobian could not be evaluated";
      break;
    }
    if (gradient_norm(normal) < options.gradient_tolerance) {
      sol.converged = true;
      sol.termination = "gradient norm below tolerance";
      break;
    }
    ++sol.iterations;

    bool accepted = false;
    bool stop = false;
    while (!accepted) {
      Eigen::VectorXd dc;
      std::vector<Vec3> dp;
      double trial = kInf;
      SfmEstimate candidate;
      if (solve_step(normal, lambda, &dc, &dp)) {
        candidate = prob.apply(sol.estimate, dc, dp);
        trial = prob.cost(candidate);
      }
      if (trial < cost) {
        const double rel = (cost - trial) / cost;
        sol.estimate = std::move(candidate);
        cost = trial;
        sol.cost_history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < options.relative_cost_tolerance) {
          sol.converged = true;
          sol.termination = "relative cost decrease below tolerance";
          stop = true;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // No step reduces the cost any further: a (numerical) minimum.
          sol.converged = true;
          sol.termination = "no further decrease";
          stop = true;
          break;
        }
      }
    }
    if (stop) break;
  }

  sol.reprojection_rms = std::sqrt(cost / n_obs);
  const ErrorMetrics m = error_metrics(problem, sol);
  sol.rotation_error_deg = m.rotation_deg;
  sol.translation_error_deg = m.translation_deg;
  return sol;
}

}  // namespace rscam
