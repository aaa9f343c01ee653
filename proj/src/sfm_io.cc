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
#include "rscam/sfm_io.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rscam/errors.h"

namespace rscam {

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i)));
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> to_vec(const json& j) {
  if (!j.is_array() || j.size() != N) throw ConfigError("bad vector");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = j.at(i).get<double>();
  return v;
}

Mat3 to_mat3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("bad 3x3 matrix");
  Mat3 m;
  for (int i = 0; i < 3; ++i) m.row(i) = to_vec<3>(j.at(i)).transpose();
  return m;
}

}  // namespace

std::string problem_to_json(const SfmProblem& p, int indent) {
  json root;
  root["seed"] = p.seed;
  root["noise_sigma"] = p.noise_sigma;
  root["generating_model"] = std::string(to_string(p.generating_model));
  json pts = json::array();
  for (const WorldPoint& X : p.points) pts.push_back(vec(X));
  root["points"] = pts;
  json cams = json::array();
  for (size_t c = 0; c < p.cameras.size(); ++c) {
    const CameraState& cs = p.cameras[c];
    json cam;
    cam["rotation"] = mat(cs.motion.pose0.rotation.matrix());
    cam["translation"] = vec(cs.motion.pose0.translation);
    cam["linear_velocity"] = vec(cs.motion.linear_velocity);
    cam["angular_velocity"] = vec(cs.motion.angular_velocity);
    cam["K"] = mat(cs.intrinsics.K());
    cam["width"] = cs.intrinsics.width();
    cam["height"] = cs.intrinsics.height();
    cam["shutter"] = {{"scan_rate", cs.shutter.scan_rate},
                      {"first_row", cs.shutter.first_row},
                      {"frame_delay", cs.shutter.frame_delay},
                      {"framerate", cs.shutter.framerate},
                      {"row_exposure", cs.shutter.row_exposure}};
    json obs = json::array();
    if (c < p.observations.size()) {
      for (const Observation& o : p.observations[c]) {
        obs.push_back({o.point, o.pixel.x(), o.pixel.y()});
      }
    }
    cam["observations"] = obs;
    cams.push_back(cam);
  }
  root["cameras"] = cams;
  return root.dump(indent) + "\n";
}

SfmProblem problem_from_json(const std::string& text) {
  SfmProblem p;
  try {
    const json root = json::parse(text);
    p.seed = root.at("seed").get<std::uint64_t>();
    p.noise_sigma = root.at("noise_sigma").get<double>();
    p.generating_model = projection_model_from_string(
        root.at("generating_model").get<std::string>());
    for (const json& X : root.at("points")) p.points.push_back(to_vec<3>(X));
    for (const json& cam : root.at("cameras")) {
      CameraState cs;
      cs.motion.pose0.rotation =
          Rotation::FromMatrix(to_mat3(cam.at("rotation")), 1e-9);
      cs.motion.pose0.translation = to_vec<3>(cam.at("translation"));
      cs.motion.linear_velocity = to_vec<3>(cam.at("linear_velocity"));
      cs.motion.angular_velocity = to_vec<3>(cam.at("angular_velocity"));
      cs.intrinsics = CameraIntrinsics(to_mat3(cam.at("K")),
                                       cam.at("width").get<int>(),
                                       cam.at("height").get<int>());
      const json& s = cam.at("shutter");
      cs.shutter.scan_rate = s.at("scan_rate").get<double>();
      cs.shutter.first_row = s.at("first_row").get<double>();
      cs.shutter.frame_delay = s.at("frame_delay").get<double>();
      cs.shutter.framerate = s.at("framerate").get<double>();
      cs.shutter.row_exposure = s.value("row_exposure", 0.0);
      std::vector<Observation> obs;
      for (const json& o : cam.at("observations")) {
        Observation ob;
        ob.point = o.at(0).get<int>();
        ob.pixel = Vec2(o.at(1).get<double>(), o.at(2).get<double>());
        if (ob.point < 0) throw ConfigError("negative point index");
        obs.push_back(ob);
      }
      p.cameras.push_back(cs);
      p.observations.push_back(std::move(obs));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed problem snapshot: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid problem snapshot: ") + e.what());
  }
  for (const auto& obs : p.observations) {
    for (const Observation& o : obs) {
      if (o.point >= static_cast<int>(p.points.size())) {
        throw ConfigError("observation refers to a missing point");
      }
    }
  }
  return p;
}

void write_problem(const SfmProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << problem_to_json(problem);
  if (!out) throw std::runtime_error("write failed: " + path);
}

SfmProblem read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

}  // namespace rscam
