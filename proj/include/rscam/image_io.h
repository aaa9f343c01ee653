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
#ifndef RSCAM_IMAGE_IO_H_
#define RSCAM_IMAGE_IO_H_

#include <string>

#include <Eigen/Core>

#include "rscam/calibration.h"

namespace rscam {

// Plain-text matrix, one line per row, comma separated. Lines starting with
// '#' are comments. Throws std::runtime_error on I/O or parse failure.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// 8-bit binary PGM (P5); values in [0, 1] are scaled to 0..255. Reading
// accepts P5 and P2 with maxval <= 65535 and rescales to [0, 1].
void write_pgm(const Eigen::MatrixXd& gray, const std::string& path);
Eigen::MatrixXd read_pgm(const std::string& path);

// I(y, t) as rows = scanlines, columns = frames.
void write_spatiotemporal_csv(const SpatioTemporalImage& img,
                              const std::string& path);
SpatioTemporalImage read_spatiotemporal_csv(const std::string& path,
                                            double framerate);
SpatioTemporalImage read_spatiotemporal_pgm(const std::string& path,
                                            double framerate);

}  // namespace rscam

#endif  // RSCAM_IMAGE_IO_H_
