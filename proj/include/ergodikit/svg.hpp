#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ergodikit {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct SvgPlotOptions {
  std::size_t width = 720;
  std::size_t height = 420;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  double y_min = 0.0;
  double y_max = 1.0;
  /// Emitted as an XML comment right after the root element.
  std::string comment;
};

namespace detail {

inline std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string svg_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v) >= 1e4 || (v != 0.0 && std::abs(v) < 1e-2)) {
    std::snprintf(buf, sizeof buf, "%.0e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

}  // namespace detail

/// Line chart with axes, ticks and a legend. Output depends only on the
/// inputs, so identical data renders to identical bytes.
inline void render_svg(std::ostream& out, std::span<const SvgSeries> series, const SvgPlotOptions& opt) {
  using detail::svg_num;
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double w = static_cast<double>(opt.width);
  const double h = static_cast<double>(opt.height);
  const double left = 60, right = 130, top = 36, bottom = 50;
  const double pw = w - left - right;
  const double ph = h - top - bottom;

  double x_lo = 0.0, x_hi = 1.0;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      const double tx = opt.log_x ? std::log10(x) : x;
      if (!any) {
        x_lo = x_hi = tx;
        any = true;
      }
      x_lo = std::min(x_lo, tx);
      x_hi = std::max(x_hi, tx);
    }
  }
  if (x_hi - x_lo <= 0.0) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  const double y_span = opt.y_max - opt.y_min > 0.0 ? opt.y_max - opt.y_min : 1.0;
  const auto px = [&](double x) { return left + ((opt.log_x ? std::log10(x) : x) - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return top + (1.0 - (y - opt.y_min) / y_span) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
      << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  if (!opt.comment.empty()) out << "<!-- " << opt.comment << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    out << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << detail::svg_escape(opt.title) << "</text>\n";
  }
  // axes
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(top + ph) << "\" x2=\"" << svg_num(left + pw)
      << "\" y2=\"" << svg_num(top + ph) << "\"/>\n"
      << "<line x1=\"" << svg_num(left) << "\" y1=\"" << svg_num(top) << "\" x2=\"" << svg_num(left)
      << "\" y2=\"" << svg_num(top + ph) << "\"/>\n"
      << "</g>\n";

  out << "<g font-size=\"11\" fill=\"black\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double y = opt.y_min + y_span * k / 5.0;
    out << "<line x1=\"" << svg_num(left - 4) << "\" y1=\"" << svg_num(py(y)) << "\" x2=\"" << svg_num(left)
        << "\" y2=\"" << svg_num(py(y)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << svg_num(left - 7) << "\" y=\"" << svg_num(py(y) + 4) << "\" text-anchor=\"end\">"
        << detail::tick_label(y) << "</text>\n";
  }
  if (opt.log_x) {
    for (double d = std::ceil(x_lo); d <= std::floor(x_hi) + 1e-9; d += 1.0) {
      const double x = std::pow(10.0, d);
      out << "<line x1=\"" << svg_num(px(x)) << "\" y1=\"" << svg_num(top + ph) << "\" x2=\"" << svg_num(px(x))
          << "\" y2=\"" << svg_num(top + ph + 4) << "\" stroke=\"black\"/>"
          << "<text x=\"" << svg_num(px(x)) << "\" y=\"" << svg_num(top + ph + 17) << "\" text-anchor=\"middle\">"
          << detail::tick_label(x) << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double x = x_lo + (x_hi - x_lo) * k / 5.0;
      out << "<line x1=\"" << svg_num(px(x)) << "\" y1=\"" << svg_num(top + ph) << "\" x2=\"" << svg_num(px(x))
          << "\" y2=\"" << svg_num(top + ph + 4) << "\" stroke=\"black\"/>"
          << "<text x=\"" << svg_num(px(x)) << "\" y=\"" << svg_num(top + ph + 17) << "\" text-anchor=\"middle\">"
          << detail::tick_label(x) << "</text>\n";
    }
  }
  if (!opt.x_label.empty()) {
    out << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"" << svg_num(h - 10) << "\" text-anchor=\"middle\">"
        << detail::svg_escape(opt.x_label) << "</text>\n";
  }
  if (!opt.y_label.empty()) {
    out << "<text x=\"14\" y=\"" << svg_num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << svg_num(top + ph / 2) << ")\">" << detail::svg_escape(opt.y_label) << "</text>\n";
  }
  out << "</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t k = 0; k < series[i].points.size(); ++k) {
      const auto& [x, y] = series[i].points[k];
      out << (k ? " " : "") << svg_num(px(x)) << ',' << svg_num(py(y));
    }
    out << "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(i) + 6;
    out << "<line x1=\"" << svg_num(left + pw + 12) << "\" y1=\"" << svg_num(ly) << "\" x2=\""
        << svg_num(left + pw + 30) << "\" y2=\"" << svg_num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/><text x=\"" << svg_num(left + pw + 35) << "\" y=\"" << svg_num(ly + 4)
        << "\" font-size=\"11\">" << detail::svg_escape(series[i].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ergodikit
