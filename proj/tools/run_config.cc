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
#include "run_config.h"

#include <fstream>
#include <sstream>

#include "rscam/errors.h"

namespace rscam::cli {

json default_config() {
  return json::parse(R"({
  "seed": 1,
  "camera": {"width": 640, "height": 480, "hfov_deg": 40.0, "K": null},
  "shutter": {"framerate": 15.0, "scan_rate": null, "first_row": 0.0,
              "frame_delay": 0.0},
  "motion": {"velocity_kmh": [0.0, 0.0, 0.0],
             "angular_velocity_revs": [0.0, 0.0, 0.0],
             "rotation_deg": [0.0, 0.0, 0.0],
             "translation": [0.0, 0.0, 0.0]},
  "project": {"points": [[0.0, 0.0, 10.0]], "points_file": null,
              "exact": false},
  "render": {"depth": 0.5, "hfov_deg": 40.0, "framerate": 30.0,
             "width": 640, "height": 480,
             "omega_revs": [0.0, 0.25, 0.5, 0.75, 1.0],
             "square_m": 0.05, "squares": 12, "scan_rate_scale": 1.0,
             "edge_samples": 41},
  "calibration": {"framerates": [3.75, 7.5, 15.0], "led_hz": [40.0],
                  "n_rows": 240, "n_frames": 32, "duty": 0.5,
                  "exposure_gradient": true, "noise": 0.0,
                  "zero_padding": 4,
                  "spectrum": {"framerate": 3.75, "led_hz": 20.0}},
  "sfm": {"velocities_kmh": [1.875, 3.75, 5.625, 7.5],
          "sigmas_px": [0.5, 1.33, 2.16, 3.0, 3.83, 4.66],
          "trials": 20, "threads": 1,
          "velocity_direction": [0.0, 1.0, 0.0],
          "angular_velocity_revs": [0.0, 0.0, 0.0],
          "estimate_velocities": false,
          "init_rotation_deg": 2.0, "init_translation_fraction": 0.02,
          "max_iterations": 200, "write_snapshots": false,
          "scene": {"num_points": 100, "num_cameras": 2,
                    "width": 640, "height": 480, "hfov_deg": 40.0,
                    "framerate": 15.0, "cloud_distance": 10.0,
                    "cloud_size": 4.0, "baseline_min": 3.0,
                    "baseline_max": 6.0, "max_roll_deg": 5.0}},
  "flow": {"grid": 5, "extent": 0.2, "depth": 10.0, "h": 1e-4,
           "first_row": null},
  "slits": {"grid": 10}
})");
}

namespace {

// Rejects keys that the defaults do not know about (typos would otherwise
// be silently ignored). Null defaults accept any value.
void check_keys(const json& defaults, const json& value,
                const std::string& where) {
  if (!value.is_object() || !defaults.is_object()) return;
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!defaults.contains(it.key())) {
      throw ConfigError("unknown configuration key: " + path);
    }
    check_keys(defaults.at(it.key()), it.value(), path);
  }
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

}  // namespace

json resolve_config(const std::string& config_path,
                    const std::vector<std::string>& overrides) {
  const json defaults = default_config();
  json config = defaults;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    json patch;
    try {
      patch = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ConfigError("malformed config " + config_path + ": " + e.what());
    }
    if (!patch.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(defaults, patch, "");
    config.merge_patch(patch);
  }
  for (const std::string& o : overrides) {
    const size_t eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override must look like key.path=value: " + o);
    }
    std::vector<std::string> parts;
    std::stringstream keys(o.substr(0, eq));
    for (std::string key; std::getline(keys, key, '.');) parts.push_back(key);
    const json value = parse_value(o.substr(eq + 1));
    json patch = json::object();
    json* node = &patch;
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = value;
    check_keys(defaults, patch, "");
    // Assigned rather than merged so that a null override is kept.
    json* target = &config;
    for (size_t i = 0; i + 1 < parts.size(); ++i) target = &(*target)[parts[i]];
    (*target)[parts.back()] = value;
  }
  return config;
}

namespace {

const json& at(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError("missing configuration key: " + key);
  }
  return j.at(key);
}

}  // namespace

double get_double(const json& j, const std::string& key) {
  const json& v = at(j, key);
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& key) {
  const json& v = at(j, key);
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& key) {
  const json& v = at(j, key);
  if (!v.is_boolean()) throw ConfigError(key + " must be true or false");
  return v.get<bool>();
}

std::vector<double> get_doubles(const json& j, const std::string& key) {
  const json& v = at(j, key);
  if (!v.is_array()) throw ConfigError(key + " must be a list of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(key + " must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

Vec3 get_vec3(const json& j, const std::string& key) {
  const std::vector<double> v = get_doubles(j, key);
  if (v.size() != 3) throw ConfigError(key + " must have three entries");
  return {v[0], v[1], v[2]};
}

CameraIntrinsics make_intrinsics(const json& camera) {
  const int w = get_int(camera, "width");
  const int h = get_int(camera, "height");
  try {
    if (!at(camera, "K").is_null()) {
      const json& k = camera.at("K");
      if (!k.is_array() || k.size() != 3) throw ConfigError("K must be 3x3");
      Mat3 K;
      for (int i = 0; i < 3; ++i) {
        const std::vector<double> row =
            get_doubles(json{{"K", k.at(i)}}, "K");
        if (row.size() != 3) throw ConfigError("K must be 3x3");
        for (int c = 0; c < 3; ++c) K(i, c) = row[c];
      }
      return CameraIntrinsics(K, w, h);
    }
    return CameraIntrinsics::FromFieldOfView(w, h,
                                             get_double(camera, "hfov_deg"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid camera: ") + e.what());
  }
}

ShutterParams make_shutter(const json& shutter, const CameraIntrinsics& K) {
  ShutterParams s =
      ShutterParams::ForFramerate(get_double(shutter, "framerate"), K.height());
  if (!at(shutter, "scan_rate").is_null()) {
    s.scan_rate = get_double(shutter, "scan_rate");
  }
  s.first_row = get_double(shutter, "first_row");
  s.frame_delay = get_double(shutter, "frame_delay");
  try {
    s.validate(K.height());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid shutter: ") + e.what());
  }
  return s;
}

MotionState make_motion(const json& motion) {
  MotionState m;
  const Vec3 rot = get_vec3(motion, "rotation_deg") * (kTwoPi / 360.0);
  m.pose0.rotation = rotation_exp(rot, 1.0);
  m.pose0.translation = get_vec3(motion, "translation");
  m.linear_velocity = get_vec3(motion, "velocity_kmh") / 3.6;
  m.angular_velocity = get_vec3(motion, "angular_velocity_revs") * kTwoPi;
  if (!m.is_finite()) throw ConfigError("motion must be finite");
  return m;
}

}  // namespace rscam::cli
