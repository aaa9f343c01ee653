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
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rscam/calibration.h"
#include "rscam/errors.h"
#include "rscam/geometry.h"
#include "rscam/optical_flow.h"
#include "rscam/sfm.h"
#include "rscam/sfm_io.h"
#include "rscam/shutter_model.h"
#include "rscam/xslit.h"

namespace py = pybind11;
using namespace rscam;

namespace {

ScanTimeCase parse_case(const std::string& name) {
  for (ScanTimeCase c :
       {ScanTimeCase::kFrontoParallelLinear, ScanTimeCase::kAxialQuadratic,
        ScanTimeCase::kGeneralQuadratic, ScanTimeCase::kExactNonlinear}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown scan-time method: " + name);
}

MotionState make_motion(const Mat3& R, const Vec3& T, const Vec3& v,
                        const Vec3& w) {
  MotionState m;
  m.pose0.rotation = Rotation::FromMatrix(R, 1e-9);
  m.pose0.translation = T;
  m.linear_velocity = v;
  m.angular_velocity = w;
  return m;
}

py::dict metrics_dict(const SfmSolution& s) {
  py::dict d;
  d["reprojection_rms"] = s.reprojection_rms;
  d["rotation_error_deg"] = s.rotation_error_deg;
  d["translation_error_deg"] =
      s.translation_error_deg ? py::cast(*s.translation_error_deg) : py::none();
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  d["termination"] = s.termination;
  d["cost_history"] = s.cost_history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rscam, m) {
  m.doc() = "Rolling-shutter camera geometry";

  auto error = py::register_exception<Error>(m, "RscamError",
                                             PyExc_RuntimeError);
  // Translators run newest first, so subclasses are registered last.
  auto depth = py::register_exception<DepthError>(m, "DepthError", error.ptr());
  py::register_exception<NegativeDepth>(m, "NegativeDepth", depth.ptr());
  py::register_exception<NoScanTime>(m, "NoScanTime", error.ptr());
  py::register_exception<Singularity>(m, "Singularity", error.ptr());
  py::register_exception<DegenerateSlits>(m, "DegenerateSlits", error.ptr());
  py::register_exception<NoPeak>(m, "NoPeak", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init<const Mat3&, int, int>(), py::arg("K"), py::arg("width"),
           py::arg("height"))
      .def_static("from_fov", &CameraIntrinsics::FromFieldOfView,
                  py::arg("width"), py::arg("height"), py::arg("hfov_deg"))
      .def_property_readonly("K", &CameraIntrinsics::K)
      .def_property_readonly("width", &CameraIntrinsics::width)
      .def_property_readonly("height", &CameraIntrinsics::height)
      .def_property_readonly("pixel_size", &CameraIntrinsics::pixel_size)
      .def("to_pixel", &CameraIntrinsics::to_pixel)
      .def("to_normalized", &CameraIntrinsics::to_normalized);

  py::class_<ShutterParams>(m, "ShutterParams")
      .def(py::init([](double scan_rate, double first_row, double frame_delay,
                       double framerate) {
             ShutterParams s;
             s.scan_rate = scan_rate;
             s.first_row = first_row;
             s.frame_delay = frame_delay;
             s.framerate = framerate;
             return s;
           }),
           py::arg("scan_rate"), py::arg("first_row") = 0.0,
           py::arg("frame_delay") = 0.0, py::arg("framerate") = 1.0)
      .def_static("for_framerate", &ShutterParams::ForFramerate,
                  py::arg("framerate"), py::arg("n_rows"))
      .def_readwrite("scan_rate", &ShutterParams::scan_rate)
      .def_readwrite("first_row", &ShutterParams::first_row)
      .def_readwrite("frame_delay", &ShutterParams::frame_delay)
      .def_readwrite("framerate", &ShutterParams::framerate)
      .def("validate", &ShutterParams::validate, py::arg("n_rows"));

  py::class_<MotionState>(m, "MotionState")
      .def(py::init(&make_motion), py::arg("R") = Mat3::Identity(),
           py::arg("T") = Vec3::Zero(), py::arg("v") = Vec3::Zero(),
           py::arg("w") = Vec3::Zero())
      .def_property_readonly(
          "R", [](const MotionState& s) { return s.pose0.rotation.matrix(); })
      .def_property_readonly(
          "T", [](const MotionState& s) { return s.pose0.translation; })
      .def_readwrite("v", &MotionState::linear_velocity)
      .def_readwrite("w", &MotionState::angular_velocity);

  py::class_<RsProjection>(m, "RsProjection")
      .def_readonly("pixel", &RsProjection::pixel)
      .def_readonly("scan_time", &RsProjection::scan_time)
      .def_readonly("perspective", &RsProjection::perspective)
      .def_readonly("correction", &RsProjection::correction)
      .def_property_readonly(
          "method",
          [](const RsProjection& p) { return std::string(to_string(p.method)); })
      .def_readonly("multiple_roots", &RsProjection::multiple_roots);

  m.def("rotation_exp",
        [](const Vec3& w, double t) { return rotation_exp(w, t).matrix(); },
        py::arg("w"), py::arg("t") = 1.0);
  m.def("rotation_log",
        [](const Mat3& R) { return rotation_log(Rotation::FromMatrix(R, 1e-9)); });
  m.def("project_perspective",
        [](const Vec3& X, const MotionState& motion, const CameraIntrinsics& K,
           double t, bool linearized) {
          return project_perspective(X, camera_matrix_at(motion, K, t,
                                                         linearized));
        },
        py::arg("X"), py::arg("motion"), py::arg("K"), py::arg("t") = 0.0,
        py::arg("linearized") = true);
  m.def("project_rolling_shutter",
        [](const Vec3& X, const MotionState& motion, const CameraIntrinsics& K,
           const ShutterParams& s, bool exact) {
          return project_rolling_shutter(X, motion, K, s, exact);
        },
        py::arg("X"), py::arg("motion"), py::arg("K"), py::arg("shutter"),
        py::arg("exact") = false);
  m.def("solve_scan_time",
        [](const Vec3& X, const MotionState& motion, const CameraIntrinsics& K,
           const ShutterParams& s, const std::string& method) {
          return solve_scan_time(X, motion, K, s, parse_case(method)).time;
        },
        py::arg("X"), py::arg("motion"), py::arg("K"), py::arg("shutter"),
        py::arg("method") = "general_quadratic");
  m.def("limit_line", &limit_line, py::arg("shutter"), py::arg("K"),
        py::arg("v_y"));
  m.def("max_correction_on_plane", &max_correction_on_plane,
        py::arg("motion"), py::arg("K"), py::arg("shutter"), py::arg("depth"),
        py::arg("grid") = 48);

  m.def("compute_slits",
        [](const MotionState& motion, const CameraIntrinsics& K,
           const ShutterParams& s) {
          const SlitPair p = compute_slits(motion, K, s);
          return py::make_tuple(
              py::make_tuple(p.slit1.point(), p.slit1.direction()),
              py::make_tuple(p.slit2.point(), p.slit2.direction()));
        });
  m.def("backproject",
        [](const Vec2& q, const MotionState& motion, const CameraIntrinsics& K,
           const ShutterParams& s) {
          const Line3D l = backproject(q, motion, K, s);
          return py::make_tuple(l.point(), l.direction());
        });
  m.def("line_line_distance",
        [](const Vec3& p1, const Vec3& d1, const Vec3& p2, const Vec3& d2) {
          return line_line_distance(Line3D(p1, d1), Line3D(p2, d2));
        });

  m.def("flow_perspective",
        [](double u, double v, double z, const MotionState& motion) {
          return flow_perspective(u, v, z, motion).vec();
        });
  m.def("flow_rolling_shutter",
        [](double u, double v, double z, const MotionState& motion,
           const CameraIntrinsics& K, const ShutterParams& s) {
          return flow_rolling_shutter(u, v, z, motion, K, s).vec();
        });
  m.def("flow_finite_difference",
        [](double u, double v, double z, const MotionState& motion,
           const CameraIntrinsics& K, const ShutterParams& s, double h) {
          return flow_finite_difference(u, v, z, motion, K, s, h).vec();
        });

  m.def("synthesize_led_image",
        [](double framerate, int n_rows, int n_frames, double led_hz,
           double duty, bool exposure_gradient) {
          LedPattern led{led_hz, duty, exposure_gradient};
          return synthesize_led_image(
                     ShutterParams::ForFramerate(framerate, n_rows), n_rows,
                     n_frames, led)
              .values;
        },
        py::arg("framerate"), py::arg("n_rows"), py::arg("n_frames"),
        py::arg("led_hz"), py::arg("duty") = 0.5,
        py::arg("exposure_gradient") = false);
  m.def("estimate_seconds_per_row",
        [](const Eigen::MatrixXd& image, double framerate, double led_hz) {
          const CalibrationEstimate e =
              estimate_scan_rate({image, framerate}, led_hz);
          return py::make_tuple(e.seconds_per_row, e.uncertainty);
        },
        py::arg("image"), py::arg("framerate"), py::arg("led_hz"));
  m.def("ideal_seconds_per_row", &ideal_seconds_per_row);

  m.def("sfm_trial",
        [](double velocity_kmh, double sigma_px, std::uint64_t seed,
           const std::string& model) {
          SceneConfig scene;
          scene.velocity_kmh = Vec3(0, velocity_kmh, 0);
          scene.noise_sigma = sigma_px;
          const SfmProblem p = generate_problem(scene, seed);
          return metrics_dict(
              bundle_adjust(p, projection_model_from_string(model)));
        },
        py::arg("velocity_kmh"), py::arg("sigma_px"), py::arg("seed") = 1,
        py::arg("model") = "rolling_shutter");
  m.def("sfm_problem_json",
        [](double velocity_kmh, double sigma_px, std::uint64_t seed) {
          SceneConfig scene;
          scene.velocity_kmh = Vec3(0, velocity_kmh, 0);
          scene.noise_sigma = sigma_px;
          return problem_to_json(generate_problem(scene, seed));
        },
        py::arg("velocity_kmh"), py::arg("sigma_px"), py::arg("seed") = 1);
  m.def("experiment_grid_csv",
        [](const std::vector<double>& velocities,
           const std::vector<double>& sigmas, int trials, std::uint64_t seed,
           int threads) {
          ExperimentConfig c;
          c.velocities_kmh = velocities;
          c.sigmas_px = sigmas;
          c.trials = trials;
          c.seed = seed;
          c.threads = threads;
          py::gil_scoped_release release;
          return results_csv(run_experiment_grid(c));
        },
        py::arg("velocities_kmh"), py::arg("sigmas_px"), py::arg("trials"),
        py::arg("seed") = 1, py::arg("threads") = 1);
}
