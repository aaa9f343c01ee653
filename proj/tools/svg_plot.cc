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
#include "svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rscam::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string svg_panels(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Panel>& panels) {
  const double pw = 260, ph = 220, ml = 60, mt = 50, gap = 30, mb = 50;
  const double width = ml + panels.size() * (pw + gap);
  const double height = mt + ph + mb + 30;

  // Shared y range so panels compare at a glance.
  double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity();
  for (const Panel& p : panels) {
    for (const Series& s : p.series) {
      for (size_t i = 0; i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0;
        ymax = std::max(ymax, s.y[i] + e);
      }
    }
  }
  if (!(ymax > ymin)) ymax = 1.0;
  ymax *= 1.05;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">" + escape(title) + "</text>\n";

  for (size_t k = 0; k < panels.size(); ++k) {
    const Panel& p = panels[k];
    const double x0 = ml + k * (pw + gap), y0 = mt;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (const Series& s : p.series) {
      for (double x : s.x) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
      }
    }
    if (!(xmax > xmin)) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    auto X = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return y0 + ph - (y - ymin) / (ymax - ymin) * ph; };

    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" +
           num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x0 + pw / 2) + "\" y=\"" + num(y0 - 8) +
           "\" text-anchor=\"middle\">" + escape(p.title) + "</text>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = xmin + t * (xmax - xmin) / 4;
      const double yv = ymin + t * (ymax - ymin) / 4;
      out += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(y0 + ph + 14) +
             "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
      if (k == 0) {
        out += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(Y(yv) + 4) +
               "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
      }
    }
    out += "<text x=\"" + num(x0 + pw / 2) + "\" y=\"" + num(y0 + ph + 32) +
           "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";

    for (const Series& s : p.series) {
      std::string pts;
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
        if (i < s.err.size() && std::isfinite(s.err[i]) && s.err[i] > 0) {
          out += "<line x1=\"" + num(X(s.x[i])) + "\" y1=\"" +
                 num(Y(s.y[i] - s.err[i])) + "\" x2=\"" + num(X(s.x[i])) +
                 "\" y2=\"" + num(Y(s.y[i] + s.err[i])) + "\" stroke=\"" +
                 s.color + "\"/>\n";
        }
      }
      out += "<polyline fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + " points=\"" +
             pts + "\"/>\n";
    }
    if (k == 0) {
      double ly = y0 + 14;
      for (const Series& s : p.series) {
        out += "<line x1=\"" + num(x0 + 8) + "\" y1=\"" + num(ly - 4) +
               "\" x2=\"" + num(x0 + 28) + "\" y2=\"" + num(ly - 4) +
               "\" stroke=\"" + s.color + "\"" +
               (s.dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
        out += "<text x=\"" + num(x0 + 32) + "\" y=\"" + num(ly) + "\">" +
               escape(s.label) + "</text>\n";
        ly += 14;
      }
    }
  }
  out += "<text transform=\"translate(14," + num(mt + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(ylabel) +
         "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace rscam::cli
