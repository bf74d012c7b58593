#pragma once

// Text output: fixed-format numbers for CSV files and bare-bones SVG plots.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "memgate/errors.hpp"

namespace memgate {

// Volts: 6 decimals. "-0.000000" is written as "0.000000".
inline std::string fmt_volts(double v, int decimals = 6) {
  auto s = fmt::format("{:.{}f}", v, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// Currents, charges, energies: scientific notation, 6 significant digits.
inline std::string fmt_sci(double v) {
  if (v == 0.0) v = 0.0;
  auto s = fmt::format("{:.5e}", v);
  if (s.front() == '-' && s.find_first_not_of("-0.e+") == std::string::npos) s.erase(0, 1);
  return s;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + p.string() + "'");
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

namespace svg {

inline constexpr int kWidth = 640, kHeight = 420, kMargin = 50;

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors[i % 8];
}

inline std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
      "text-anchor=\"middle\">{3}</text>\n",
      kWidth, kHeight, kWidth / 2, title);
}

inline std::string axes(double x0, double x1, double y0, double y1, const std::string& xl,
                        const std::string& yl) {
  const int l = kMargin, r = kWidth - kMargin, t = kMargin, b = kHeight - kMargin;
  std::string s = fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", l, t,
      r - l, b - t);
  s += fmt::format(
      "<g font-family=\"sans-serif\" font-size=\"11\">\n"
      "<text x=\"{}\" y=\"{}\">{:.3g}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n"
      "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text><text x=\"{}\" y=\"{}\" "
      "text-anchor=\"end\">{:.3g}</text>\n"
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n"
      "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>\n</g>\n",
      l, b + 15, x0, r, b + 15, x1, l - 4, b, y0, l - 4, t + 10, y1, (l + r) / 2, kHeight - 12, xl,
      (t + b) / 2, (t + b) / 2, yl);
  return s;
}

inline std::pair<double, double> range_of(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 1.0};
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double a = *lo, b = *hi;
  if (!(b > a)) b = a + 1.0;
  return {a, b};
}

}  // namespace svg

inline std::string line_plot(const std::string& title, const std::string& xl, const std::string& yl,
                             const std::vector<Series>& series) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const auto [x0, x1] = svg::range_of(xs);
  const auto [y0, y1] = svg::range_of(ys);
  const double w = svg::kWidth - 2 * svg::kMargin, h = svg::kHeight - 2 * svg::kMargin;
  std::string out = svg::header(title) + svg::axes(x0, x1, y0, y1, xl, yl);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                       svg::palette(k));
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", svg::kMargin + (s.x[i] - x0) / (x1 - x0) * w,
                         svg::kMargin + (1.0 - (s.y[i] - y0) / (y1 - y0)) * h);
    out += "\"/>\n";
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
        svg::kWidth - svg::kMargin - 80, svg::kMargin + 14 * (k + 1), svg::palette(k), s.name);
  }
  return out + "</svg>\n";
}

// values[i * nb + j] at (a[i], b[j]); a runs along y, b along x.
inline std::string heat_map(const std::string& title, const std::string& xl, const std::string& yl,
                            const std::vector<double>& a, const std::vector<double>& b,
                            const std::vector<double>& values) {
  const auto [v0, v1] = svg::range_of(values);
  const double w = svg::kWidth - 2 * svg::kMargin, h = svg::kHeight - 2 * svg::kMargin;
  const double cw = w / static_cast<double>(b.size()), ch = h / static_cast<double>(a.size());
  std::string out = svg::header(title);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double t = (values[i * b.size() + j] - v0) / (v1 - v0);
      const int g = static_cast<int>(std::lround(255.0 * t));
      out += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"rgb({},{},{})\"/>\n",
          svg::kMargin + j * cw, svg::kMargin + (a.size() - 1 - i) * ch, cw + 0.05, ch + 0.05, g, g,
          255 - g / 2);
    }
  out += svg::axes(b.front(), b.back(), a.front(), a.back(), xl, yl);
  return out + "</svg>\n";
}

inline std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                             const std::vector<double>& values, double y_max) {
  const double w = svg::kWidth - 2 * svg::kMargin, h = svg::kHeight - 2 * svg::kMargin;
  const double bw = w / static_cast<double>(std::max<std::size_t>(labels.size(), 1));
  if (!(y_max > 0.0)) y_max = 1.0;
  std::string out = svg::header(title) + svg::axes(0, 0, 0.0, y_max, "", "V_OUT (V)");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double bh = std::clamp(values[i] / y_max, 0.0, 1.0) * h;
    out += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n"
        "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">{}</text>\n",
        svg::kMargin + i * bw + 0.1 * bw, svg::kMargin + h - bh, 0.8 * bw, bh, svg::palette(0),
        svg::kMargin + (i + 0.5) * bw, svg::kHeight - svg::kMargin + 28, labels[i]);
  }
  return out + "</svg>\n";
}

}  // namespace memgate
