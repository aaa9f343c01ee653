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
#include "rscam/image_io.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rscam {

namespace {

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

}  // namespace

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out = open_out(path, false);
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("bad number '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged matrix in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix in " + path);
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_pgm(const Eigen::MatrixXd& gray, const std::string& path) {
  std::ofstream out = open_out(path, true);
  out << "P5\n" << gray.cols() << ' ' << gray.rows() << "\n255\n";
  std::vector<unsigned char> bytes(gray.size());
  size_t k = 0;
  for (Eigen::Index i = 0; i < gray.rows(); ++i) {
    for (Eigen::Index j = 0; j < gray.cols(); ++j) {
      const double v = std::clamp(gray(i, j), 0.0, 1.0);
      bytes[k++] = static_cast<unsigned char>(std::lround(255.0 * v));
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd read_pgm(const std::string& path) {
  std::ifstream in = open_in(path, true);
  const std::string magic = header_token(in);
  if (magic != "P5" && magic != "P2") {
    throw std::runtime_error("not a PGM file: " + path);
  }
  const int width = std::stoi(header_token(in));
  const int height = std::stoi(header_token(in));
  const int maxval = std::stoi(header_token(in));
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw std::runtime_error("bad PGM header in " + path);
  }
  Eigen::MatrixXd m(height, width);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      int value = 0;
      if (magic == "P2") {
        if (!(in >> value)) throw std::runtime_error("truncated " + path);
      } else if (maxval < 256) {
        const int c = in.get();
        if (c == EOF) throw std::runtime_error("truncated " + path);
        value = c;
      } else {
        const int hi = in.get();
        const int lo = in.get();
        if (lo == EOF) throw std::runtime_error("truncated " + path);
        value = (hi << 8) | lo;
      }
      m(i, j) = static_cast<double>(value) / maxval;
    }
  }
  return m;
}

void write_spatiotemporal_csv(const SpatioTemporalImage& img,
                              const std::string& path) {
  write_matrix_csv(img.values, path);
}

SpatioTemporalImage read_spatiotemporal_csv(const std::string& path,
                                            double framerate) {
  return {read_matrix_csv(path), framerate};
}

SpatioTemporalImage read_spatiotemporal_pgm(const std::string& path,
                                            double framerate) {
  return {read_pgm(path), framerate};
}

}  // namespace rscam
