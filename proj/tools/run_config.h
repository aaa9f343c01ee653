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
#ifndef RSCAM_TOOLS_RUN_CONFIG_H_
#define RSCAM_TOOLS_RUN_CONFIG_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "rscam/geometry.h"
#include "rscam/shutter_model.h"

namespace rscam::cli {

using nlohmann::json;

// Built-in defaults for every command.
json default_config();

// defaults <- config file (JSON merge patch) <- "a.b.c=value" overrides.
// Values parse as JSON when possible and fall back to strings. Throws
// ConfigError on unreadable files, malformed JSON or unknown keys.
json resolve_config(const std::string& config_path,
                    const std::vector<std::string>& overrides);

// Typed accessors; throw ConfigError naming the offending key.
double get_double(const json& j, const std::string& key);
int get_int(const json& j, const std::string& key);
bool get_bool(const json& j, const std::string& key);
Vec3 get_vec3(const json& j, const std::string& key);
std::vector<double> get_doubles(const json& j, const std::string& key);

// Camera, shutter and motion from the shared sections. Velocities are in
// km/h and angular velocities in revolutions per second at the boundary.
CameraIntrinsics make_intrinsics(const json& camera);
ShutterParams make_shutter(const json& shutter, const CameraIntrinsics& K);
MotionState make_motion(const json& motion);

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace rscam::cli

#endif  // RSCAM_TOOLS_RUN_CONFIG_H_
