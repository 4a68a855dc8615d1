#include "swarmlab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swarmlab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 48.0;

const char* kPalette[] = {"#1f6fb2", "#c94f2a", "#3c8a4e",
                          "#8456b8", "#b58a1f", "#4f4f4f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log_scale = false;

  double map(double v, double pix_lo, double pix_hi) const {
    double t = log_scale ? std::log10(v) : v;
    double a = log_scale ? std::log10(lo) : lo;
    double b = log_scale ? std::log10(hi) : hi;
    if (b <= a) b = a + 1.0;
    return pix_lo + (t - a) / (b - a) * (pix_hi - pix_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log_scale) {
      const int e0 = static_cast<int>(std::floor(std::log10(lo)));
      const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
      for (int e = e0; e <= e1; ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * 0.999 && v <= hi * 1.001) out.push_back(v);
      }
      if (out.empty()) out = {lo, hi};
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    if (raw / mag >= 5.0) step = 5.0 * mag;
    else if (raw / mag >= 2.0) step = 2.0 * mag;
    const double start = std::ceil(lo / step) * step;
    for (double v = start; v <= hi + 0.5 * step; v += step) out.push_back(v);
    return out;
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  bool first = true;
  for (const PlotSeries& s : spec.series) {
    for (size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      const double x = s.x[k];
      const double y = s.y[k];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (spec.log_x && x <= 0.0) continue;
      if (spec.log_y && y <= 0.0) continue;
      if (first) {
        x_lo = x_hi = x;
        y_lo = y_hi = y;
        first = false;
      } else {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
    }
  }
  if (first) {
    x_lo = y_lo = spec.log_x || spec.log_y ? 0.1 : 0.0;
    x_hi = y_hi = 1.0;
  }
  if (spec.log_x) {
    if (x_hi <= x_lo) x_hi = x_lo * 10.0;
  } else {
    const double pad = 0.05 * std::max(x_hi - x_lo, 1e-12);
    x_lo -= pad;
    x_hi += pad;
  }
  if (spec.log_y) {
    if (y_hi <= y_lo) y_hi = y_lo * 10.0;
  } else {
    const double pad = 0.05 * std::max(y_hi - y_lo, 1e-12);
    y_lo -= pad;
    y_hi += pad;
  }
  Axis ax{x_lo, x_hi, spec.log_x};
  Axis ay{y_lo, y_hi, spec.log_y};
  const double px0 = kMarginLeft;
  const double px1 = kWidth - kMarginRight;
  const double py0 = kHeight - kMarginBottom;  // pixel y grows downward
  const double py1 = kMarginTop;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(spec.title) << "</text>\n";

  for (double t : ax.ticks()) {
    const double px = ax.map(t, px0, px1);
    if (px < px0 - 0.5 || px > px1 + 0.5) continue;
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << py0 << "\" x2=\""
        << num(px) << "\" y2=\"" << py1
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << py0 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t, py0, py1);
    if (py > py0 + 0.5 || py < py1 - 0.5) continue;
    svg << "<line x1=\"" << px0 << "\" y1=\"" << num(py) << "\" x2=\"" << px1
        << "\" y2=\"" << num(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << px0 - 8 << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << num(t) << "</text>\n";
  }
  svg << "<rect x=\"" << px0 << "\" y=\"" << py1 << "\" width=\""
      << px1 - px0 << "\" height=\"" << py0 - py1
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (py0 + py1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 16 "
      << (py0 + py1) / 2 << ")\">" << escape(spec.y_label) << "</text>\n";

  int color_index = 0;
  double legend_y = py1 + 16.0;
  for (const PlotSeries& s : spec.series) {
    const std::string color =
        s.color.empty() ? kPalette[color_index % 6] : s.color;
    ++color_index;
    if (s.scatter) {
      for (size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        const double x = s.x[k];
        const double y = s.y[k];
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
        svg << "<circle cx=\"" << num(ax.map(x, px0, px1)) << "\" cy=\""
            << num(ay.map(y, py0, py1)) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    } else {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        const double x = s.x[k];
        const double y = s.y[k];
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        if ((spec.log_x && x <= 0.0) || (spec.log_y && y <= 0.0)) continue;
        svg << num(ax.map(x, px0, px1)) << "," << num(ay.map(y, py0, py1))
            << " ";
      }
      svg << "\"/>\n";
    }
    if (!s.label.empty()) {
      svg << "<rect x=\"" << px0 + 10 << "\" y=\"" << num(legend_y - 9)
          << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
      svg << "<text x=\"" << px0 + 28 << "\" y=\"" << num(legend_y + 2)
          << "\" font-family=\"sans-serif\" font-size=\"12\">"
          << escape(s.label) << "</text>\n";
      legend_y += 18.0;
    }
  }
  if (!spec.annotation.empty()) {
    svg << "<text x=\"" << px1 - 8 << "\" y=\"" << py1 + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << escape(spec.annotation) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << render_svg(spec);
}

}  // namespace swarmlab
