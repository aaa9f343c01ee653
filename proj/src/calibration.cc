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
#include "rscam/calibration.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "rscam/errors.h"

namespace rscam {

namespace {

void check_pattern(const LedPattern& led) {
  if (!(led.frequency_hz > 0.0)) {
    throw std::invalid_argument("LED frequency must be positive");
  }
  if (!(led.duty > 0.0 && led.duty <= 1.0)) {
    throw std::invalid_argument("LED duty cycle must lie in (0, 1]");
  }
}

bool led_on(const LedPattern& led, double t) {
  if (led.duty >= 1.0) return true;
  const double phase = t * led.frequency_hz;
  return phase - std::floor(phase) < led.duty;
}

double row_time(const ShutterParams& s, int frame, int row) {
  return frame / s.framerate + frame * s.frame_delay +
         (row + s.first_row) / s.scan_rate;
}

double gradient(int i, int n) {
  return n > 1 ? 1.0 - 0.5 * i / (n - 1.0) : 1.0;
}

// FFTW planning and plan destruction are not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

SpatioTemporalImage synthesize_led_image(const ShutterParams& s, int n_rows,
                                         int n_frames, const LedPattern& led) {
  check_pattern(led);
  if (n_rows <= 0 || n_frames <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (s.scan_rate == 0.0 || !(s.framerate > 0.0)) {
    throw std::invalid_argument("invalid shutter parameters");
  }
  SpatioTemporalImage img;
  img.framerate = s.framerate;
  img.values.resize(n_rows, n_frames);
  for (int k = 0; k < n_frames; ++k) {
    for (int y = 0; y < n_rows; ++y) {
      double value = led_on(led, row_time(s, k, y)) ? 1.0 : 0.0;
      if (led.exposure_gradient) value *= gradient(y, n_rows);
      img.values(y, k) = value;
    }
  }
  return img;
}

std::vector<Eigen::MatrixXd> synthesize_led_frames(const ShutterParams& s,
                                                   int n_rows, int n_cols,
                                                   int n_frames,
                                                   const LedPattern& led) {
  if (n_cols <= 0) throw std::invalid_argument("column count must be > 0");
  LedPattern flat = led;
  flat.exposure_gradient = false;
  const SpatioTemporalImage base =
      synthesize_led_image(s, n_rows, n_frames, flat);
  std::vector<Eigen::MatrixXd> frames;
  frames.reserve(n_frames);
  for (int k = 0; k < n_frames; ++k) {
    Eigen::MatrixXd f = base.values.col(k).replicate(1, n_cols);
    if (led.exposure_gradient) {
      for (int c = 0; c < n_cols; ++c) f.col(c) *= gradient(c, n_cols);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

SpatioTemporalImage marginalize_columns(
    const std::vector<Eigen::MatrixXd>& frames, int col_begin, int col_end,
    double framerate) {
  if (frames.empty()) throw std::invalid_argument("no frames");
  const Eigen::Index rows = frames.front().rows();
  const Eigen::Index cols = frames.front().cols();
  if (col_begin < 0 || col_end > cols || col_begin >= col_end) {
    throw std::invalid_argument("invalid column range");
  }
  SpatioTemporalImage img;
  img.framerate = framerate;
  img.values.resize(rows, static_cast<Eigen::Index>(frames.size()));
  for (size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].rows() != rows || frames[k].cols() != cols) {
      throw std::invalid_argument("frames differ in size");
    }
    img.values.col(static_cast<Eigen::Index>(k)) =
        frames[k].middleCols(col_begin, col_end - col_begin).rowwise().mean();
  }
  return img;
}

MarginalSpectrum marginal_spectrum(const SpatioTemporalImage& img,
                                   const SpectrumOptions& options) {
  const int n_rows = img.rows();
  const int n_frames = img.frames();
  if (n_rows < 4 || n_frames < 1) {
    throw std::invalid_argument("spatio-temporal image is too small");
  }
  const int length = std::max(1, options.zero_padding) * n_rows;
  const int half = length / 2 + 1;

  // Row-major n_frames x length real input, temporal axis first.
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(
      fftw_malloc(sizeof(double) * n_frames * length)));
  std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(
      fftw_malloc(sizeof(fftw_complex) * n_frames * half)));
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_2d(n_frames, length, in.get(), out.get(),
                                    FFTW_ESTIMATE));
  }

  std::fill(in.get(), in.get() + n_frames * length, 0.0);
  // Least-squares line through each frame's profile; removing it takes out
  // the mean and any slow shading (vignetting, exposure ramps) that would
  // otherwise leak into the lowest bins.
  const double yc = 0.5 * (n_rows - 1);
  double syy = 0.0;
  for (int y = 0; y < n_rows; ++y) syy += (y - yc) * (y - yc);
  for (int k = 0; k < n_frames; ++k) {
    const double mean = img.values.col(k).mean();
    double sxy = 0.0;
    for (int y = 0; y < n_rows; ++y) sxy += (y - yc) * img.values(y, k);
    const double slope = sxy / syy;
    for (int y = 0; y < n_rows; ++y) {
      double w = 1.0;
      if (options.hann_window) {
        w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * y / (n_rows - 1));
      }
      in.get()[k * length + y] =
          (img.values(y, k) - mean - slope * (y - yc)) * w;
    }
  }
  fftw_execute(plan.get());

  MarginalSpectrum spec;
  spec.bin_width = 1.0 / length;
  spec.frequency.resize(half);
  spec.magnitude.assign(half, 0.0);
  for (int j = 0; j < half; ++j) {
    spec.frequency[j] = static_cast<double>(j) / length;
  }
  for (int k = 0; k < n_frames; ++k) {
    for (int j = 1; j < half; ++j) {
      const fftw_complex& c = out.get()[k * half + j];
      spec.magnitude[j] += std::hypot(c[0], c[1]);
    }
  }
  return spec;
}

CalibrationEstimate estimate_scan_rate(const SpatioTemporalImage& img,
                                       double led_hz,
                                       const SpectrumOptions& options) {
  if (!(led_hz > 0.0)) throw std::invalid_argument("LED frequency must be > 0");
  const MarginalSpectrum spec = marginal_spectrum(img, options);
  const std::vector<double>& m = spec.magnitude;
  const int n = static_cast<int>(m.size());

  std::vector<double> sorted(m.begin() + 1, m.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double largest = *std::max_element(m.begin() + 1, m.end());

  int peak = -1;
  for (int j = 1; j + 1 < n; ++j) {
    if (m[j] < m[j - 1] || m[j] <= m[j + 1]) continue;
    if (m[j] <= options.significance * median) continue;
    if (m[j] < options.harmonic_fraction * largest) continue;
    peak = j;
    break;
  }
  // What survives detrending may be pure rounding noise.
  const double floor =
      1e-9 * img.values.cwiseAbs().sum() + std::numeric_limits<double>::min();
  if (peak < 0 || !(largest > floor)) {
    throw NoPeak("no significant spatial-frequency peak");
  }

  // Parabolic refinement on the three samples around the peak.
  const double denom = m[peak - 1] - 2.0 * m[peak] + m[peak + 1];
  double offset = 0.0;
  if (denom < 0.0) {
    offset = std::clamp(0.5 * (m[peak - 1] - m[peak + 1]) / denom, -0.5, 0.5);
  }
  const double nu = (peak + offset) * spec.bin_width;

  CalibrationEstimate est;
  est.led_hz = led_hz;
  est.peak_cycles_per_row = nu;
  est.seconds_per_row = nu / led_hz;
  est.uncertainty = 0.5 * spec.bin_width / led_hz;
  return est;
}

double ideal_seconds_per_row(double framerate, int n_rows) {
  if (!(framerate > 0.0) || n_rows <= 0) {
    throw std::invalid_argument("framerate and row count must be positive");
  }
  return 1.0 / (framerate * n_rows);
}

}  // namespace rscam
