#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tvi/csv.hpp"
#include "tvi/errors.hpp"

// Static SVG plots with no external renderer: fixed canvas, fixed palette,
// fixed tick rules, coordinates rounded to 1/100 px, so the same data always
// produces the same bytes.

namespace tvi {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotOptions {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  bool equal_aspect = false;  // same data-units-per-pixel on both axes
  bool markers = false;       // circle at each point, for sparse tables
  int width = 800, height = 520;
};

namespace detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  double span() const { return hi - lo; }
};

inline AxisRange padded_range(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) {
    double d = std::max(0.5, std::abs(lo) * 0.1);
    return {lo - d, hi + d};
  }
  double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad};
}

/// Tick positions: multiples of a 1/2/5 step on linear axes, integer decades
/// (strided when crowded) on log axes, where the range is already in log10.
inline std::vector<double> axis_ticks(const AxisRange& r, bool log_scale) {
  std::vector<double> t;
  if (log_scale) {
    int e0 = static_cast<int>(std::ceil(r.lo - 1e-9));
    int e1 = static_cast<int>(std::floor(r.hi + 1e-9));
    if (e1 < e0) return t;
    int stride = 1 + (e1 - e0) / 8;
    for (int e = e0; e <= e1; e += stride) t.push_back(static_cast<double>(e));
    return t;
  }
  double raw = r.span() / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
  double first = std::ceil(r.lo / step) * step;
  for (double v = first; v <= r.hi + 0.5 * step * 1e-9 + 1e-30; v += step) {
    if (std::abs(v) < 1e-12 * step) v = 0.0;
    t.push_back(v);
    if (t.size() > 20) break;
  }
  return t;
}

inline std::string tick_label(double v, bool log_scale) {
  if (!log_scale) return fmt_tick(v);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(v)));
  return buf;
}

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

/// Render the series to a standalone SVG file.  Points that are not finite
/// (or not positive on a log axis) are dropped.
inline void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                           const PlotOptions& opts) {
  using detail::fmt_px;
  const double ml = 70, mr = 24, mt = 40, mb = 56;
  const double pw = opts.width - ml - mr;
  const double ph = opts.height - mt - mb;

  // Transform to plot coordinates (log10 where requested) and find ranges.
  std::vector<std::vector<std::pair<double, double>>> pts(series.size());
  double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
  bool any = false;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    const std::size_t m = std::min(sr.x.size(), sr.y.size());
    for (std::size_t k = 0; k < m; ++k) {
      double x = sr.x[k], y = sr.y[k];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (opts.logx) {
        if (!(x > 0.0)) continue;
        x = std::log10(x);
      }
      if (opts.logy) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = y;
        any = true;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
      pts[s].emplace_back(x, y);
    }
  }
  detail::AxisRange xr = detail::padded_range(xlo, xhi);
  detail::AxisRange yr = detail::padded_range(ylo, yhi);
  if (opts.equal_aspect) {
    double sx = xr.span() / pw, sy = yr.span() / ph;
    double s = std::max(sx, sy);
    double xc = 0.5 * (xr.lo + xr.hi), yc = 0.5 * (yr.lo + yr.hi);
    xr = {xc - 0.5 * s * pw, xc + 0.5 * s * pw};
    yr = {yc - 0.5 * s * ph, yc + 0.5 * s * ph};
  }
  auto X = [&](double v) { return ml + (v - xr.lo) / xr.span() * pw; };
  auto Y = [&](double v) { return static_cast<double>(opts.height) - mb - (v - yr.lo) / yr.span() * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opts.width) +
         "\" height=\"" + std::to_string(opts.height) + "\" viewBox=\"0 0 " +
         std::to_string(opts.width) + " " + std::to_string(opts.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out += "<g font-family=\"Menlo, Consolas, monospace\" font-size=\"12\" fill=\"#222222\">\n";
  if (!opts.title.empty())
    out += "<text x=\"" + fmt_px(opts.width / 2.0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           opts.title + "</text>\n";

  // Grid and tick labels.
  for (double v : detail::axis_ticks(xr, opts.logx)) {
    double px = X(v);
    out += "<line x1=\"" + fmt_px(px) + "\" y1=\"" + fmt_px(mt) + "\" x2=\"" + fmt_px(px) +
           "\" y2=\"" + fmt_px(opts.height - mb) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fmt_px(px) + "\" y=\"" + fmt_px(opts.height - mb + 18) +
           "\" text-anchor=\"middle\">" + detail::tick_label(v, opts.logx) + "</text>\n";
  }
  for (double v : detail::axis_ticks(yr, opts.logy)) {
    double py = Y(v);
    out += "<line x1=\"" + fmt_px(ml) + "\" y1=\"" + fmt_px(py) + "\" x2=\"" +
           fmt_px(opts.width - mr) + "\" y2=\"" + fmt_px(py) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fmt_px(ml - 8) + "\" y=\"" + fmt_px(py + 4) +
           "\" text-anchor=\"end\">" + detail::tick_label(v, opts.logy) + "</text>\n";
  }

  // Axes frame.
  out += "<rect x=\"" + fmt_px(ml) + "\" y=\"" + fmt_px(mt) + "\" width=\"" + fmt_px(pw) +
         "\" height=\"" + fmt_px(ph) + "\" fill=\"none\" stroke=\"#222222\"/>\n";
  if (!opts.xlabel.empty())
    out += "<text x=\"" + fmt_px(ml + pw / 2.0) + "\" y=\"" + fmt_px(opts.height - 12) +
           "\" text-anchor=\"middle\">" + opts.xlabel + "</text>\n";
  if (!opts.ylabel.empty())
    out += "<text x=\"16\" y=\"" + fmt_px(mt + ph / 2.0) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt_px(mt + ph / 2.0) + ")\">" + opts.ylabel + "</text>\n";

  // Data.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = detail::series_color(s);
    if (!pts[s].empty()) {
      out += "<polyline fill=\"none\" stroke=\"";
      out += color;
      out += "\" stroke-width=\"1.5\" stroke-linejoin=\"round\" points=\"";
      for (std::size_t k = 0; k < pts[s].size(); ++k) {
        if (k) out += ' ';
        out += fmt_px(X(pts[s][k].first)) + "," + fmt_px(Y(pts[s][k].second));
      }
      out += "\"/>\n";
    }
    if (opts.markers)
      for (const auto& [x, y] : pts[s])
        out += "<circle cx=\"" + fmt_px(X(x)) + "\" cy=\"" + fmt_px(Y(y)) +
               "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
  }

  // Legend.
  double ly = mt + 16;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = opts.width - mr - 210;
    out += "<line x1=\"" + fmt_px(lx) + "\" y1=\"" + fmt_px(ly - 4) + "\" x2=\"" +
           fmt_px(lx + 24) + "\" y2=\"" + fmt_px(ly - 4) + "\" stroke=\"" +
           std::string(detail::series_color(s)) + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt_px(lx + 30) + "\" y=\"" + fmt_px(ly) + "\">" + series[s].label +
           "</text>\n";
    ly += 18;
  }

  out += "</g>\n</svg>\n";

  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << out;
  f.close();
  if (f.fail()) throw IoError("write failed: " + path);
}

enum class PlotKind { energy_trace, orbit_xy, loglog };

inline PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "energy_trace") return PlotKind::energy_trace;
  if (s == "orbit_xy") return PlotKind::orbit_xy;
  if (s == "loglog") return PlotKind::loglog;
  throw ConfigError("unknown plot kind: " + s);
}

/// Build one series per input CSV (labelled by file stem) and render it.
/// energy_trace wants trajectory files (t, energy_error), orbit_xy wants a
/// planar trajectory (q0, q1), loglog wants convergence tables
/// (h, global_error).
inline void emit_plot(const std::vector<std::string>& csv_paths, PlotKind kind,
                      const std::string& out_path) {
  if (csv_paths.empty()) throw ConfigError("plot: need at least one input CSV");
  PlotOptions opts;
  const char *xcol = nullptr, *ycol = nullptr;
  switch (kind) {
    case PlotKind::energy_trace:
      xcol = "t";
      ycol = "energy_error";
      opts.title = "energy error trace";
      break;
    case PlotKind::orbit_xy:
      xcol = "q0";
      ycol = "q1";
      opts.title = "configuration orbit";
      opts.equal_aspect = true;
      break;
    case PlotKind::loglog:
      xcol = "h";
      ycol = "global_error";
      opts.title = "convergence";
      opts.logx = opts.logy = true;
      opts.markers = true;
      break;
  }
  opts.xlabel = xcol;
  opts.ylabel = ycol;

  std::vector<PlotSeries> series;
  for (const auto& path : csv_paths) {
    CsvTable t = read_csv(path);
    int xi = t.column(xcol), yi = t.column(ycol);
    if (xi < 0 || yi < 0)
      throw ConfigError(path + ": schema mismatch, need columns '" + xcol + "' and '" + ycol +
                        "'");
    PlotSeries s;
    s.label = std::filesystem::path(path).stem().string();
    s.x.reserve(t.rows.size());
    s.y.reserve(t.rows.size());
    for (const auto& row : t.rows) {
      s.x.push_back(row[static_cast<std::size_t>(xi)]);
      s.y.push_back(row[static_cast<std::size_t>(yi)]);
    }
    series.push_back(std::move(s));
  }
  write_svg_plot(out_path, series, opts);
}

}  // namespace tvi
