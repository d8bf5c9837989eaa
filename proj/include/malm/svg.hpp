#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace malm {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "residual";
  bool log_y = true;
  int width = 800;
  int height = 500;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline const char* plot_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

// Renders a line plot as a standalone SVG 1.1 document. One polyline per
// series with exactly one point per sample (out-of-range values are clamped
// to the plot box rather than dropped). y-axis is log10 by default; zero or
// negative samples are clamped to the smallest positive representable value
// before taking logs.
inline std::string render_line_plot(const std::vector<PlotSeries>& series,
                                    const PlotOptions& opt = {}) {
  if (series.empty()) throw std::invalid_argument("render_line_plot: no series");
  for (const PlotSeries& s : series) {
    if (s.x.empty()) throw std::invalid_argument("render_line_plot: empty series " + s.label);
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("render_line_plot: x/y size mismatch in series " + s.label);
  }

  const double left = 70.0, right = 20.0, top = 34.0, bottom = 48.0;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;

  auto ty = [&](double v) { return opt.log_y ? std::log10(std::max(v, 1e-300)) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, ty(v));
      ymax = std::max(ymax, ty(v));
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return top + (ymax - ty(v)) / (ymax - ymin) * ph; };
  auto clamp_px = [&](double v) { return std::clamp(v, left, left + pw); };
  auto clamp_py = [&](double v) { return std::clamp(v, top, top + ph); };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" + std::to_string(opt.height) +
         "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " + std::to_string(opt.height) +
         "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
         std::to_string(opt.height) + "\" fill=\"white\"/>\n";

  // axes box
  out += "<rect x=\"" + detail::svg_num(left) + "\" y=\"" + detail::svg_num(top) + "\" width=\"" +
         detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // x ticks: 5 evenly spaced
  for (int i = 0; i <= 4; ++i) {
    const double v = xmin + (xmax - xmin) * i / 4.0;
    const double gx = px(v);
    out += "<line x1=\"" + detail::svg_num(gx) + "\" y1=\"" + detail::svg_num(top) + "\" x2=\"" +
           detail::svg_num(gx) + "\" y2=\"" + detail::svg_num(top + ph) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::svg_num(gx) + "\" y=\"" + detail::svg_num(top + ph + 18.0) +
           "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"monospace\">" +
           detail::xml_escape(detail::tick_label(v)) + "</text>\n";
  }

  // y ticks: powers of ten on a log axis, 5 even steps otherwise
  std::vector<double> yticks;
  if (opt.log_y) {
    const int lo = static_cast<int>(std::ceil(ymin - 1e-9));
    const int hi = static_cast<int>(std::floor(ymax + 1e-9));
    int stride = 1;
    while ((hi - lo) / stride + 1 > 9) ++stride;
    for (int e = lo; e <= hi; e += stride) yticks.push_back(static_cast<double>(e));
    if (yticks.empty()) yticks.push_back(0.5 * (ymin + ymax));
  } else {
    for (int i = 0; i <= 4; ++i) yticks.push_back(ymin + (ymax - ymin) * i / 4.0);
  }
  for (double t : yticks) {
    const double gy = top + (ymax - t) / (ymax - ymin) * ph;
    out += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(gy) + "\" x2=\"" +
           detail::svg_num(left + pw) + "\" y2=\"" + detail::svg_num(gy) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    const std::string label = opt.log_y ? ("1e" + detail::tick_label(t)) : detail::tick_label(t);
    out += "<text x=\"" + detail::svg_num(left - 6.0) + "\" y=\"" + detail::svg_num(gy + 4.0) +
           "\" font-size=\"12\" text-anchor=\"end\" font-family=\"monospace\">" +
           detail::xml_escape(label) + "</text>\n";
  }

  // labels + title
  out += "<text x=\"" + detail::svg_num(left + pw / 2.0) + "\" y=\"" +
         detail::svg_num(opt.height - 10.0) +
         "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"monospace\">" +
         detail::xml_escape(opt.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::svg_num(top + ph / 2.0) +
         "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"monospace\" transform=\"rotate(-90 16 " +
         detail::svg_num(top + ph / 2.0) + ")\">" + detail::xml_escape(opt.y_label) + "</text>\n";
  if (!opt.title.empty())
    out += "<text x=\"" + detail::svg_num(left + pw / 2.0) +
           "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\" font-family=\"monospace\">" +
           detail::xml_escape(opt.title) + "</text>\n";

  // polylines
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    std::string pts;
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (j) pts += ' ';
      pts += detail::svg_num(clamp_px(px(s.x[j])));
      pts += ',';
      pts += detail::svg_num(clamp_py(py(s.y[j])));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(detail::plot_color(i)) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  }

  // legend
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ly = top + 14.0 + 16.0 * static_cast<double>(i);
    const double lx = left + pw - 150.0;
    out += "<line x1=\"" + detail::svg_num(lx) + "\" y1=\"" + detail::svg_num(ly - 4.0) +
           "\" x2=\"" + detail::svg_num(lx + 22.0) + "\" y2=\"" + detail::svg_num(ly - 4.0) +
           "\" stroke=\"" + std::string(detail::plot_color(i)) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(lx + 28.0) + "\" y=\"" + detail::svg_num(ly) +
           "\" font-size=\"12\" font-family=\"monospace\">" + detail::xml_escape(series[i].label) +
           "</text>\n";
  }

  out += "</svg>\n";
  return out;
}

inline void write_svg(const std::string& path, const std::string& svg) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_svg: cannot open " + path);
  f << svg;
  if (!f) throw std::runtime_error("write_svg: write failed for " + path);
}

}  // namespace malm
