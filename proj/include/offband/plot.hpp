// Copyright 2026 The offband Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <string>
#include <vector>

#include "offband/harness.hpp"
#include "offband/results_io.hpp"

namespace offband {

// Maps (alpha, regret) to SVG pixel coordinates. y grows downwards.
struct PlotFrame {
  double width = 720.0;
  double height = 440.0;
  double left = 80.0;
  double right = 170.0;
  double top = 30.0;
  double bottom = 60.0;
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double x(double alpha) const { return left + (alpha - x_min) / (x_max - x_min) * (width - left - right); }
  double y(double value) const { return top + (y_max - value) / (y_max - y_min) * (height - top - bottom); }

  static PlotFrame fit(const std::vector<AggregateStats>& stats) {
    PlotFrame f;
    f.x_min = f.y_min = std::numeric_limits<double>::infinity();
    f.x_max = f.y_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : stats) {
      f.x_min = std::min(f.x_min, s.alpha);
      f.x_max = std::max(f.x_max, s.alpha);
      for (double v : {s.mean, s.q25, s.q75}) {
        if (!std::isfinite(v)) continue;
        f.y_min = std::min(f.y_min, v);
        f.y_max = std::max(f.y_max, v);
      }
    }
    if (!(f.x_max > f.x_min)) {
      f.x_min -= 0.5;
      f.x_max += 0.5;
    }
    if (!std::isfinite(f.y_min)) {
      f.y_min = 0.0;
      f.y_max = 1.0;
    } else if (!(f.y_max > f.y_min)) {
      f.y_min -= 1.0;
      f.y_max += 1.0;
    } else {
      const double pad = 0.05 * (f.y_max - f.y_min);
      f.y_min -= pad;
      f.y_max += pad;
    }
    return f;
  }
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Final regret against alpha: one mean line per algorithm over a shaded
// 25%-75% quantile band.
inline std::string render_svg(const std::vector<AggregateStats>& stats) {
  if (stats.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to plot");
  static constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                                      "#9467bd", "#ff7f0e", "#8c564b"};
  const PlotFrame f = PlotFrame::fit(stats);

  std::vector<Algorithm> order;
  for (const auto& s : stats) {
    if (std::find(order.begin(), order.end(), s.algorithm) == order.end()) order.push_back(s.algorithm);
  }

  using detail::fmt;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(f.width, "%.0f") + "\" height=\"" +
         fmt(f.height, "%.0f") + "\" viewBox=\"0 0 " + fmt(f.width, "%.0f") + " " + fmt(f.height, "%.0f") + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double x0 = f.left, x1 = f.width - f.right, y0 = f.top, y1 = f.height - f.bottom;
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x1) + "\" y2=\"" + fmt(y1) + "\"/>\n";
  svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(y1) + "\"/>\n";
  svg += "</g>\n";

  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double a = f.x_min + (f.x_max - f.x_min) * i / 5.0;
    const double v = f.y_min + (f.y_max - f.y_min) * i / 5.0;
    svg += "<text x=\"" + fmt(f.x(a)) + "\" y=\"" + fmt(y1 + 16) + "\" text-anchor=\"middle\">" + fmt(a) +
           "</text>\n";
    svg += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(f.y(v) + 4) + "\" text-anchor=\"end\">" + fmt(v, "%.1f") +
           "</text>\n";
  }
  svg += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(f.height - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\">alpha</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt((y0 + y1) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         fmt((y0 + y1) / 2) + ")\">final regret</text>\n";
  svg += "</g>\n";

  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::string color = kColors[k % kColors.size()];
    const std::string name = detail::xml_escape(algorithm_name(order[k]));
    std::vector<AggregateStats> series;
    for (const auto& s : stats) {
      if (s.algorithm == order[k] && std::isfinite(s.mean) && std::isfinite(s.q25) && std::isfinite(s.q75)) {
        series.push_back(s);
      }
    }
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
    if (series.empty()) continue;

    std::string band, line;
    for (const auto& s : series) band += fmt(f.x(s.alpha)) + "," + fmt(f.y(s.q75)) + " ";
    for (auto it = series.rbegin(); it != series.rend(); ++it) band += fmt(f.x(it->alpha)) + "," + fmt(f.y(it->q25)) + " ";
    for (const auto& s : series) line += fmt(f.x(s.alpha)) + "," + fmt(f.y(s.mean)) + " ";
    band.pop_back();
    line.pop_back();

    svg += "<g data-algorithm=\"" + name + "\">\n";
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"mean\" points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2.5\"/>\n";
    for (const auto& s : series) {
      svg += "<circle cx=\"" + fmt(f.x(s.alpha)) + "\" cy=\"" + fmt(f.y(s.mean)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    const double ly = y0 + 20.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fmt(x1 + 15) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(x1 + 40) + "\" y2=\"" + fmt(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + fmt(x1 + 46) + "\" y=\"" + fmt(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
           name + "</text>\n";
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const std::vector<AggregateStats>& stats, const std::filesystem::path& path) {
  write_file_atomic(path, render_svg(stats));
}

}  // namespace offband
