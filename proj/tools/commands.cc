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
#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "rscam/calibration.h"
#include "rscam/errors.h"
#include "rscam/image_io.h"
#include "rscam/optical_flow.h"
#include "rscam/sfm.h"
#include "rscam/sfm_io.h"
#include "rscam/xslit.h"
#include "svg_plot.h"

namespace rscam::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string line;
  for (const std::string& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string config_text(const json& config) { return config.dump(2) + "\n"; }

// Table to stdout, or to a file accompanied by <file>.config.json.
void emit_table(const std::string& table, const json& config,
                const Output& out) {
  if (out.file.empty()) {
    std::cout << table;
    return;
  }
  write_text(out.file, table);
  write_text(out.file + ".config.json", config_text(config));
}

fs::path prepare_dir(const Output& out, const json& config) {
  if (out.dir.empty()) throw ConfigError("this command needs --out-dir");
  fs::create_directories(out.dir);
  write_text(fs::path(out.dir) / "config.resolved.json", config_text(config));
  return out.dir;
}

std::string indexed(const std::string& stem, size_t i, const std::string& ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%02zu.%s", stem.c_str(), i, ext.c_str());
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_project(const json& config, const Output& out) {
  const CameraIntrinsics K = make_intrinsics(config.at("camera"));
  const ShutterParams s = make_shutter(config.at("shutter"), K);
  const MotionState m = make_motion(config.at("motion"));
  const json& pc = config.at("project");
  const bool exact = get_bool(pc, "exact");

  std::vector<WorldPoint> points;
  if (!pc.at("points_file").is_null()) {
    const Eigen::MatrixXd table =
        read_matrix_csv(pc.at("points_file").get<std::string>());
    if (table.cols() != 3) throw ConfigError("points file needs 3 columns");
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
      points.emplace_back(table(i, 0), table(i, 1), table(i, 2));
    }
  } else {
    for (const json& p : pc.at("points")) {
      points.push_back(get_vec3(json{{"point", p}}, "point"));
    }
  }
  if (points.empty()) throw ConfigError("no points to project");

  const double z_limit = limit_line(s, K, std::abs(m.linear_velocity.y()));
  std::string table = csv_row({"x", "y", "z", "persp_u", "persp_v", "rs_u",
                               "rs_v", "scan_time_s", "correction_px",
                               "method", "multiple_roots", "depth_m",
                               "limit_depth_m", "region"});
  for (size_t i = 0; i < points.size(); ++i) {
    const WorldPoint& X = points[i];
    RsProjection p;
    try {
      p = project_rolling_shutter(X, m, K, s, exact);
    } catch (const Error&) {
      std::fprintf(stderr, "point %zu (%g, %g, %g): ", i, X.x(), X.y(), X.z());
      throw;
    }
    const double depth = m.pose0.to_camera(X).z();
    const bool safe = depth > z_limit;
    table += csv_row({fmt(X.x()), fmt(X.y()), fmt(X.z()),
                      fmt(p.perspective.x()), fmt(p.perspective.y()),
                      fmt(p.pixel.x()), fmt(p.pixel.y()), fmt(p.scan_time),
                      fmt(p.correction.norm()),
                      std::string(to_string(p.method)),
                      p.multiple_roots ? "1" : "0", fmt(depth), fmt(z_limit),
                      safe ? "safe" : "unsafe"});
  }
  emit_table(table, config, out);
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

struct Board {
  double square;
  int squares;
  double depth;
  double half() const { return 0.5 * square * squares; }
  Vec3 corner(double i, double j) const {
    return {-half() + i * square, -half() + j * square, depth};
  }
};

// Each pixel row is exposed at its own time; the ray through the pixel at
// that time is intersected with the board plane.
Eigen::MatrixXd render_board(const Board& b, const MotionState& m,
                             const CameraIntrinsics& K,
                             const ShutterParams& s) {
  Eigen::MatrixXd img(K.height(), K.width());
  for (int v = 0; v < K.height(); ++v) {
    const double t = (v + s.first_row) / s.scan_rate;
    const Mat3 R = rotation_exp(m.angular_velocity, t).matrix() *
                   m.pose0.rotation.matrix();
    const Vec3 T = m.pose0.translation + t * m.linear_velocity;
    const Vec3 centre = -R.transpose() * T;
    for (int u = 0; u < K.width(); ++u) {
      const NormalizedPoint q = K.to_normalized(PixelPoint(u, v));
      const Vec3 dir = R.transpose() * Vec3(q.x(), q.y(), 1.0);
      double value = 0.5;
      if (std::abs(dir.z()) > 1e-12) {
        const double lambda = (b.depth - centre.z()) / dir.z();
        const Vec3 X = centre + lambda * dir;
        if (lambda > 0 && std::abs(X.x()) < b.half() &&
            std::abs(X.y()) < b.half()) {
          const long i = static_cast<long>(std::floor((X.x() + b.half()) / b.square));
          const long j = static_cast<long>(std::floor((X.y() + b.half()) / b.square));
          value = (i + j) % 2 == 0 ? 0.9 : 0.1;
        }
      }
      img(v, u) = value;
    }
  }
  return img;
}

std::optional<RsProjection> exact_image(const Vec3& X, const MotionState& m,
                                        const CameraIntrinsics& K,
                                        const ShutterParams& s) {
  try {
    const RsProjection p = project_rolling_shutter(X, m, K, s, true);
    if (!K.contains(p.pixel)) return std::nullopt;
    return p;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Largest distance of an imaged board line from the chord through its first
// and last visible samples.
double line_deflection(const std::vector<PixelPoint>& pts) {
  if (pts.size() < 3) return 0.0;
  const Vec2 a = pts.front(), d = pts.back() - pts.front();
  const double len = d.norm();
  if (len == 0.0) return 0.0;
  double worst = 0.0;
  for (const PixelPoint& p : pts) {
    const Vec2 w = p - a;
    worst = std::max(worst, std::abs(d.x() * w.y() - d.y() * w.x()) / len);
  }
  return worst;
}

}  // namespace

int cmd_render_checker(const json& config, const Output& out) {
  const json& rc = config.at("render");
  json cam = config.at("camera");
  cam["width"] = rc.at("width");
  cam["height"] = rc.at("height");
  cam["hfov_deg"] = rc.at("hfov_deg");
  cam["K"] = nullptr;
  const CameraIntrinsics K = make_intrinsics(cam);
  ShutterParams s =
      ShutterParams::ForFramerate(get_double(rc, "framerate"), K.height());
  s.scan_rate *= get_double(rc, "scan_rate_scale");
  try {
    s.validate(K.height());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid shutter: ") + e.what());
  }
  const Board board{get_double(rc, "square_m"), get_int(rc, "squares"),
                    get_double(rc, "depth")};
  if (!(board.square > 0) || board.squares <= 0 || !(board.depth > 0)) {
    throw ConfigError("board size and depth must be positive");
  }
  const int samples = get_int(rc, "edge_samples");
  if (samples < 3) throw ConfigError("render.edge_samples must be >= 3");
  const std::vector<double> omegas = get_doubles(rc, "omega_revs");
  if (omegas.empty()) throw ConfigError("render.omega_revs is empty");

  const fs::path dir = prepare_dir(out, config);
  std::string summary =
      csv_row({"omega_revs", "omega_rad_s", "scan_rate_rows_s",
               "corners_in_frame", "max_edge_deflection_px"});
  for (size_t k = 0; k < omegas.size(); ++k) {
    MotionState m;
    m.angular_velocity = Vec3(0, 0, omegas[k] * kTwoPi);
    write_pgm(render_board(board, m, K, s), dir / indexed("checker", k, "pgm"));

    std::string lattice =
        csv_row({"i", "j", "x", "y", "z", "u", "v", "scan_time_s"});
    int visible = 0;
    for (int j = 0; j <= board.squares; ++j) {
      for (int i = 0; i <= board.squares; ++i) {
        const Vec3 X = board.corner(i, j);
        const auto p = exact_image(X, m, K, s);
        if (!p) continue;
        ++visible;
        lattice += csv_row({std::to_string(i), std::to_string(j),
                            fmt(X.x()), fmt(X.y()), fmt(X.z()),
                            fmt(p->pixel.x()), fmt(p->pixel.y()),
                            fmt(p->scan_time)});
      }
    }
    write_text(dir / indexed("lattice", k, "csv"), lattice);

    double worst = 0.0;
    for (int line = 0; line <= board.squares; ++line) {
      for (int dirn = 0; dirn < 2; ++dirn) {
        std::vector<PixelPoint> pts;
        for (int n = 0; n < samples; ++n) {
          const double a = board.squares * n / (samples - 1.0);
          const Vec3 X = dirn == 0 ? board.corner(a, line)
                                   : board.corner(line, a);
          if (const auto p = exact_image(X, m, K, s)) pts.push_back(p->pixel);
        }
        worst = std::max(worst, line_deflection(pts));
      }
    }
    summary += csv_row({fmt(omegas[k]), fmt(omegas[k] * kTwoPi),
                        fmt(s.scan_rate), std::to_string(visible),
                        fmt(worst)});
  }
  write_text(dir / "summary.csv", summary);
  std::cerr << summary;
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

SpatioTemporalImage led_image(const json& cc, double framerate, double led_hz,
                              std::uint64_t seed) {
  const int n_rows = get_int(cc, "n_rows");
  const int n_frames = get_int(cc, "n_frames");
  LedPattern led;
  led.frequency_hz = led_hz;
  led.duty = get_double(cc, "duty");
  led.exposure_gradient = get_bool(cc, "exposure_gradient");
  const ShutterParams s = ShutterParams::ForFramerate(framerate, n_rows);
  SpatioTemporalImage img;
  try {
    img = synthesize_led_image(s, n_rows, n_frames, led);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid calibration setup: ") + e.what());
  }
  const double noise = get_double(cc, "noise");
  if (noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-noise, noise);
    for (Eigen::Index k = 0; k < img.values.cols(); ++k) {
      for (Eigen::Index y = 0; y < img.values.rows(); ++y) {
        img.values(y, k) += u(rng);
      }
    }
  }
  return img;
}

}  // namespace

int cmd_calibrate_sim(const json& config, const Output& out) {
  const json& cc = config.at("calibration");
  const std::vector<double> rates = get_doubles(cc, "framerates");
  const std::vector<double> leds = get_doubles(cc, "led_hz");
  if (rates.empty() || leds.empty()) {
    throw ConfigError("calibration grid is empty");
  }
  const int n_rows = get_int(cc, "n_rows");
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  SpectrumOptions opts;
  opts.zero_padding = get_int(cc, "zero_padding");

  std::string report = csv_row(
      {"framerate_fps", "led_hz", "n_rows", "calibrated_s_per_row",
       "uncertainty_s_per_row", "ideal_s_per_row", "abs_error_s_per_row",
       "status"});
  std::string table = "framerate  led_hz  calibrated (s/row)      ideal (s/row)\n";
  for (double f : rates) {
    for (double led : leds) {
      const SpatioTemporalImage img = led_image(cc, f, led, seed);
      const double ideal = ideal_seconds_per_row(f, n_rows);
      char line[160];
      try {
        const CalibrationEstimate e = estimate_scan_rate(img, led, opts);
        report += csv_row({fmt(f), fmt(led), std::to_string(n_rows),
                           fmt(e.seconds_per_row), fmt(e.uncertainty),
                           fmt(ideal), fmt(std::abs(e.seconds_per_row - ideal)),
                           "ok"});
        std::snprintf(line, sizeof(line),
                      "%9.3g  %6.3g  %.5f +- %.5f      %.5f\n", f, led,
                      e.seconds_per_row, e.uncertainty, ideal);
      } catch (const NoPeak&) {
        report += csv_row({fmt(f), fmt(led), std::to_string(n_rows), "", "",
                           fmt(ideal), "", "no_peak"});
        std::snprintf(line, sizeof(line), "%9.3g  %6.3g  (no peak)          %.5f\n",
                      f, led, ideal);
      }
      table += line;
    }
  }

  if (out.dir.empty()) {
    emit_table(report, config, out);
  } else {
    const fs::path dir = prepare_dir(out, config);
    write_text(dir / "calibration_report.csv", report);
    const json& sc = cc.at("spectrum");
    const double f = get_double(sc, "framerate");
    const double led = get_double(sc, "led_hz");
    const SpatioTemporalImage img = led_image(cc, f, led, seed);
    const MarginalSpectrum spec = marginal_spectrum(img, opts);
    std::string csv = csv_row({"cycles_per_row", "magnitude"});
    for (size_t i = 0; i < spec.frequency.size(); ++i) {
      csv += csv_row({fmt(spec.frequency[i]), fmt(spec.magnitude[i])});
    }
    write_text(dir / "spectrum.csv", csv);
    write_pgm(img.values, dir / "led_image.pgm");
  }
  std::cerr << table;
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_sfm_grid(const json& config, const Output& out) {
  const json& sc = config.at("sfm");
  ExperimentConfig ec;
  ec.velocities_kmh = get_doubles(sc, "velocities_kmh");
  ec.sigmas_px = get_doubles(sc, "sigmas_px");
  ec.trials = get_int(sc, "trials");
  ec.threads = get_int(sc, "threads");
  ec.seed = config.at("seed").get<std::uint64_t>();
  ec.velocity_direction = get_vec3(sc, "velocity_direction");
  ec.ba.estimate_velocities = get_bool(sc, "estimate_velocities");
  ec.ba.init_rotation_deg = get_double(sc, "init_rotation_deg");
  ec.ba.init_translation_fraction = get_double(sc, "init_translation_fraction");
  ec.ba.max_iterations = get_int(sc, "max_iterations");
  const json& scene = sc.at("scene");
  SceneConfig& s = ec.scene;
  s.num_points = get_int(scene, "num_points");
  s.num_cameras = get_int(scene, "num_cameras");
  s.width = get_int(scene, "width");
  s.height = get_int(scene, "height");
  s.hfov_deg = get_double(scene, "hfov_deg");
  s.framerate = get_double(scene, "framerate");
  s.cloud_distance = get_double(scene, "cloud_distance");
  s.cloud_size = get_double(scene, "cloud_size");
  s.baseline_min = get_double(scene, "baseline_min");
  s.baseline_max = get_double(scene, "baseline_max");
  s.max_roll_deg = get_double(scene, "max_roll_deg");
  s.angular_velocity = get_vec3(sc, "angular_velocity_revs") * kTwoPi;

  ExperimentResult result;
  try {
    result = run_experiment_grid(ec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string csv = results_csv(result);

  if (out.dir.empty()) {
    emit_table(csv, config, out);
  } else {
    const fs::path dir = prepare_dir(out, config);
    write_text(dir / "sfm_results.csv", csv);
    struct Metric {
      const char* file;
      const char* title;
      double CellSummary::*mean;
      double CellSummary::*se;
    };
    const Metric metrics[] = {
        {"plot_reprojection.svg", "Reprojection error (px)",
         &CellSummary::mean_reproj_px, &CellSummary::se_reproj},
        {"plot_rotation.svg", "Mean rotation error (degrees)",
         &CellSummary::mean_rot_deg, &CellSummary::se_rot},
        {"plot_translation.svg",
         "Mean error in direction of translation (degrees)",
         &CellSummary::mean_trans_deg, &CellSummary::se_trans}};
    for (const Metric& mt : metrics) {
      std::vector<Panel> panels;
      for (double v : ec.velocities_kmh) {
        Panel p;
        p.title = "v_y = " + fmt(v) + " km/h";
        for (ProjectionModel model : {ProjectionModel::kRollingShutter,
                                      ProjectionModel::kPerspective}) {
          Series ser;
          const bool rs = model == ProjectionModel::kRollingShutter;
          ser.label = rs ? "rolling shutter" : "perspective";
          ser.color = rs ? "#1f4fd0" : "#d02020";
          ser.dashed = !rs;
          for (double sigma : ec.sigmas_px) {
            const CellSummary& c = find_cell(result, v, sigma, model);
            ser.x.push_back(sigma);
            ser.y.push_back(c.*mt.mean);
            ser.err.push_back(c.*mt.se);
          }
          p.series.push_back(ser);
        }
        panels.push_back(p);
      }
      write_text(dir / mt.file,
                 svg_panels(mt.title, "pixel noise sigma (px)", mt.title,
                            panels));
    }
    if (get_bool(sc, "write_snapshots")) {
      const fs::path snap = dir / "problems";
      fs::create_directories(snap);
      const Vec3 vdir = ec.velocity_direction.normalized();
      const int ns = static_cast<int>(ec.sigmas_px.size());
      const int n_cells = static_cast<int>(ec.velocities_kmh.size()) * ns;
      for (int cell = 0; cell < n_cells; ++cell) {
        for (int trial = 0; trial < ec.trials; ++trial) {
          SceneConfig scene_cell = ec.scene;
          scene_cell.velocity_kmh = ec.velocities_kmh[cell / ns] * vdir;
          scene_cell.noise_sigma = ec.sigmas_px[cell % ns];
          char name[64];
          std::snprintf(name, sizeof(name), "cell%03d_trial%03d.json", cell,
                        trial);
          write_problem(generate_problem(scene_cell,
                                         trial_seed(ec.seed, cell, trial)),
                        (snap / name).string());
        }
      }
    }
  }
  int nonconverged = 0;
  for (const CellSummary& c : result.cells) nonconverged += c.nonconverged_count;
  std::cerr << result.cells.size() << " cells, " << nonconverged
            << " non-converged runs\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_flow(const json& config, const Output& out) {
  const CameraIntrinsics K = make_intrinsics(config.at("camera"));
  const json& fc = config.at("flow");
  json shutter = config.at("shutter");
  // The analytic flow assumes the scan starts at the principal row.
  shutter["first_row"] = fc.at("first_row").is_null()
                             ? json(-K.principal_row())
                             : fc.at("first_row");
  const ShutterParams s = make_shutter(shutter, K);
  const MotionState m = make_motion(config.at("motion"));
  const int grid = get_int(fc, "grid");
  const double extent = get_double(fc, "extent");
  const double depth = get_double(fc, "depth");
  const double h = get_double(fc, "h");
  if (grid < 1 || !(extent >= 0) || !(depth > 0) || !(h > 0)) {
    throw ConfigError("flow grid, extent, depth and h must be positive");
  }
  std::string table = csv_row(
      {"u", "v", "depth", "du_persp", "dv_persp", "du_rs", "dv_rs",
       "du_rs_as_printed", "dv_rs_as_printed", "du_fd", "dv_fd"});
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const double u = grid == 1 ? 0 : -extent + 2 * extent * i / (grid - 1.0);
      const double v = grid == 1 ? 0 : -extent + 2 * extent * j / (grid - 1.0);
      const FlowVector p = flow_perspective(u, v, depth, m);
      const FlowVector r = flow_rolling_shutter(u, v, depth, m, K, s);
      const FlowVector a = flow_rolling_shutter_as_printed(u, v, depth, m, K, s);
      const FlowVector f = flow_finite_difference(u, v, depth, m, K, s, h);
      worst = std::max(worst, (r.vec() - f.vec()).norm());
      table += csv_row({fmt(u), fmt(v), fmt(depth), fmt(p.du), fmt(p.dv),
                        fmt(r.du), fmt(r.dv), fmt(a.du), fmt(a.dv), fmt(f.du),
                        fmt(f.dv)});
    }
  }
  emit_table(table, config, out);
  std::cerr << "max |analytic - finite difference| = " << fmt(worst)
            << " (normalized units / s)\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_slits(const json& config, const Output& out) {
  const CameraIntrinsics K = make_intrinsics(config.at("camera"));
  const ShutterParams s = make_shutter(config.at("shutter"), K);
  const MotionState m = make_motion(config.at("motion"));
  const int grid = get_int(config.at("slits"), "grid");
  if (grid < 1) throw ConfigError("slits.grid must be >= 1");

  // Slits of the translational part; with rotation the rays miss them.
  MotionState translation = m;
  translation.angular_velocity.setZero();
  SlitPair slits = [&] {
    try {
      return compute_slits(translation, K, s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();

  std::string table = csv_row({"u_px", "v_px", "dist_slit1_m", "dist_slit2_m"});
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const PixelPoint px((i + 0.5) * K.width() / grid,
                          (j + 0.5) * K.height() / grid);
      Line3D ray = [&] {
        try {
          return backproject(K.to_normalized(px), m, K, s);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }();
      const double d1 = line_line_distance(ray, slits.slit1);
      const double d2 = line_line_distance(ray, slits.slit2);
      worst = std::max({worst, d1, d2});
      table += csv_row({fmt(px.x()), fmt(px.y()), fmt(d1), fmt(d2)});
    }
  }
  emit_table(table, config, out);
  auto line = [](const char* name, const Line3D& l) {
    std::cerr << name << ": point (" << fmt(l.point().x()) << ", "
              << fmt(l.point().y()) << ", " << fmt(l.point().z())
              << ") direction (" << fmt(l.direction().x()) << ", "
              << fmt(l.direction().y()) << ", " << fmt(l.direction().z())
              << ")\n";
  };
  line("slit1", slits.slit1);
  line("slit2", slits.slit2);
  std::cerr << "max slit residual = " << fmt(worst) << " m\n";
  return 0;
}

}  // namespace rscam::cli
