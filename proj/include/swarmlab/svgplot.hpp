// Minimal deterministic SVG plots: line series on linear or log-log axes,
// scatter overlays, and a text annotation slot for fitted slopes.
#pragma once

#include <string>
#include <vector>

namespace swarmlab {

struct PlotSeries {
  std::string label;
  std::string color = "#1f6fb2";
  bool scatter = false;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
  std::string annotation;  // rendered in the top-right corner
  std::vector<PlotSeries> series;
};

// Deterministic byte output for fixed input: fixed viewport, fixed
// formatting, no timestamps.
std::string render_svg(const PlotSpec& spec);
void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace swarmlab
