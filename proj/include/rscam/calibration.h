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
#ifndef RSCAM_CALIBRATION_H_
#define RSCAM_CALIBRATION_H_

#include <vector>

#include <Eigen/Core>

#include "rscam/shutter_model.h"

namespace rscam {

// I(y, t): one column per frame, one row per scanline, intensities in [0, 1].
struct SpatioTemporalImage {
  Eigen::MatrixXd values;
  double framerate = 1.0;

  int rows() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
};

struct LedPattern {
  double frequency_hz = 20.0;
  double duty = 0.5;  // fraction of the period the LED is on, (0, 1]
  // Brightness falloff from 1 to 0.5 along the image rows.
  bool exposure_gradient = false;
};

// Row y of frame k is lit iff the square-wave LED is on at
//   k / f + k d + (y + v0) / r.
SpatioTemporalImage synthesize_led_image(const ShutterParams& s, int n_rows,
                                         int n_frames, const LedPattern& led);

// Full frames (n_rows x n_cols each) of the same experiment. The gradient,
// when enabled, runs along the scanline.
std::vector<Eigen::MatrixXd> synthesize_led_frames(const ShutterParams& s,
                                                   int n_rows, int n_cols,
                                                   int n_frames,
                                                   const LedPattern& led);

// Mean of columns [col_begin, col_end) of every frame.
SpatioTemporalImage marginalize_columns(
    const std::vector<Eigen::MatrixXd>& frames, int col_begin, int col_end,
    double framerate);

struct SpectrumOptions {
  int zero_padding = 4;           // transform length = padding * rows
  bool hann_window = true;        // along the row axis
  double significance = 3.0;      // peak must exceed this times the median
  double harmonic_fraction = 0.5; // and this fraction of the largest peak
};

// |FFT2(I)| summed over temporal frequency, for spatial frequencies
// 0 .. 1/2 cycles per row. A least-squares line is removed from every
// frame first.
struct MarginalSpectrum {
  std::vector<double> frequency;  // cycles / row
  std::vector<double> magnitude;
  double bin_width = 0.0;         // cycles / row
};

MarginalSpectrum marginal_spectrum(const SpatioTemporalImage& img,
                                   const SpectrumOptions& options = {});

struct CalibrationEstimate {
  double seconds_per_row = 0.0;
  double uncertainty = 0.0;  // half a frequency bin, in seconds / row
  double led_hz = 0.0;
  double peak_cycles_per_row = 0.0;

  double scan_rate() const { return 1.0 / seconds_per_row; }
};

// Stripe frequency nu* from the lowest significant peak of the marginal
// spectrum (harmonics of the square wave are ignored), so that
// r = led_hz / nu*. Throws NoPeak.
CalibrationEstimate estimate_scan_rate(const SpatioTemporalImage& img,
                                       double led_hz,
                                       const SpectrumOptions& options = {});

// 1 / (f * n_rows): the row time of a shutter without inter-frame delay.
double ideal_seconds_per_row(double framerate, int n_rows);

}  // namespace rscam

#endif  // RSCAM_CALIBRATION_H_
