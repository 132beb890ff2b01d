#pragma once

// CSV tables and a small SVG line-plot renderer.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rodwave/errors.hpp"
#include "rodwave/version.hpp"

namespace rodwave {

/// Fixed-format number; rejects NaN and infinities.
inline std::string csv_number(double v) {
  if (!std::isfinite(v)) throw NumericError("non-finite value reached CSV output");
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render(const std::string& config_hash) const {
    std::string out = "# rodwave ";
    out += kVersion;
    out += " config_hash=" + config_hash + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
};

struct Panel {
  std::string ylabel;
  std::vector<Series> series;
  std::vector<std::pair<double, double>> shaded;  // x intervals drawn behind the data
};

struct Figure {
  std::string title;
  std::string xlabel;
  double x_scale = 1.0;  // divides x values on the axis labels
  std::vector<Panel> panels;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const Figure& fig) {
  using detail::num;
  const double width = 760, panel_h = 220, left = 70, right = 20, top = 40, gap = 50;
  const double height = top + fig.panels.size() * (panel_h + gap) + 10;
  const double plot_w = width - left - right;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  for (const auto& p : fig.panels)
    for (const auto& s : p.series)
      for (double x : s.x)
        if (std::isfinite(x)) xmin = std::min(xmin, x), xmax = std::max(xmax, x);
  if (!(xmax > xmin)) xmax = xmin + 1.0;

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                  num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::svg_escape(fig.title) + "</text>\n";

  for (std::size_t pi = 0; pi < fig.panels.size(); ++pi) {
    const Panel& p = fig.panels[pi];
    const double y0 = top + pi * (panel_h + gap);
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : p.series)
      for (double y : s.y)
        if (std::isfinite(y)) ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    if (!(ymax > ymin)) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto Y = [&](double y) { return y0 + panel_h - (y - ymin) / (ymax - ymin) * panel_h; };

    for (const auto& [a, b] : p.shaded)
      o += "<rect x=\"" + num(X(a)) + "\" y=\"" + num(y0) + "\" width=\"" + num(std::max(0.5, X(b) - X(a))) +
           "\" height=\"" + num(panel_h) + "\" fill=\"#f4c7c3\" opacity=\"0.6\"/>\n";
    o += "<rect x=\"" + num(left) + "\" y=\"" + num(y0) + "\" width=\"" + num(plot_w) + "\" height=\"" +
         num(panel_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = xmin + (xmax - xmin) * t / 4, yv = ymin + (ymax - ymin) * t / 4;
      o += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(y0 + panel_h + 14) + "\" text-anchor=\"middle\">" +
           detail::tick(xv / fig.x_scale) + "</text>\n";
      o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(Y(yv) + 4) + "\" text-anchor=\"end\">" +
           detail::tick(yv) + "</text>\n";
    }
    o += "<text x=\"14\" y=\"" + num(y0 + panel_h / 2) + "\" transform=\"rotate(-90 14 " +
         num(y0 + panel_h / 2) + ")\" text-anchor=\"middle\">" + detail::svg_escape(p.ylabel) + "</text>\n";
    o += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(y0 + panel_h + 30) +
         "\" text-anchor=\"middle\">" + detail::svg_escape(fig.xlabel) + "</text>\n";

    double legend_x = left + 8;
    for (const auto& s : p.series) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
      }
      o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
      o += "<text x=\"" + num(legend_x) + "\" y=\"" + num(y0 + 14) + "\" fill=\"" + s.color + "\">" +
           detail::svg_escape(s.label) + "</text>\n";
      legend_x += 12 + 7.0 * s.label.size();
    }
  }
  o += "</svg>\n";
  return o;
}

}  // namespace rodwave
