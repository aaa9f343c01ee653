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
#ifndef RSCAM_TOOLS_COMMANDS_H_
#define RSCAM_TOOLS_COMMANDS_H_

#include <string>

#include "run_config.h"

namespace rscam::cli {

// Where a command writes. Single-table commands print to stdout unless
// `file` is set; multi-file commands need `dir`. Human-readable summaries go
// to stderr so that stdout and files stay byte-reproducible.
struct Output {
  std::string file;
  std::string dir;
};

int cmd_project(const json& config, const Output& out);
int cmd_render_checker(const json& config, const Output& out);
int cmd_calibrate_sim(const json& config, const Output& out);
int cmd_sfm_grid(const json& config, const Output& out);
int cmd_flow(const json& config, const Output& out);
int cmd_slits(const json& config, const Output& out);

}  // namespace rscam::cli

#endif  // RSCAM_TOOLS_COMMANDS_H_
