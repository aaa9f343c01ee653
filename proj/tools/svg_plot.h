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
#ifndef RSCAM_TOOLS_SVG_PLOT_H_
#define RSCAM_TOOLS_SVG_PLOT_H_

#include <string>
#include <vector>

namespace rscam::cli {

struct Series {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<double> x, y, err;  // err: half-length of the error bar
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

// Row of panels sharing the axis labels, written as a standalone SVG.
std::string svg_panels(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Panel>& panels);

}  // namespace rscam::cli

#endif  // RSCAM_TOOLS_SVG_PLOT_H_
