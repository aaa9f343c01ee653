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
#ifndef RSCAM_SFM_IO_H_
#define RSCAM_SFM_IO_H_

#include <string>

#include "rscam/sfm.h"

namespace rscam {

// JSON snapshot of a problem: points, camera states (pose, velocities,
// intrinsics, shutter), observations, noise level and seed. Doubles are
// written with round-trip precision, so a reloaded problem is bit-identical.
std::string problem_to_json(const SfmProblem& problem, int indent = 2);
// Throws ConfigError on malformed input.
SfmProblem problem_from_json(const std::string& text);

void write_problem(const SfmProblem& problem, const std::string& path);
SfmProblem read_problem(const std::string& path);

}  // namespace rscam

#endif  // RSCAM_SFM_IO_H_
