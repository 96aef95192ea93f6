// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace qbsde::cli::svg {

namespace {

constexpr double kW = 640, kH = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
}

void axes(std::ostream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  const double l = kLeft, r = kW - kRight, t = kTop, b = kH - kBottom;
  os << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4, yv = f.y0 + (f.y1 - f.y0) * i / 4;
    os << "<text x=\"" << f.px(xv) << "\" y=\"" << b + 16 << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n"
       << "<text x=\"" << l - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
  }
  os << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n"
     << "<text transform=\"translate(16," << (t + b) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
     << "</text>\n";
}

}  // namespace

void line_plot(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Frame f{inf, -inf, inf, -inf};
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      f.x0 = std::min(f.x0, s.x[i]);
      f.x1 = std::max(f.x1, s.x[i]);
      f.y0 = std::min(f.y0, s.y[i]);
      f.y1 = std::max(f.y1, s.y[i]);
    }
  if (!(f.x0 < f.x1)) f = {0, 1, f.y0, f.y1};
  if (!(f.y0 < f.y1)) {
    const double c = std::isfinite(f.y0) ? f.y0 : 0.0;
    f.y0 = c - 1;
    f.y1 = c + 1;
  }
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;

  open(os, title);
  axes(os, f, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.y[i])) os << f.px(s.x[i]) << ',' << f.py(s.y[i]) << ' ';
    os << "\"/>\n"
       << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 16 * k << "\" fill=\"" << colour << "\">"
       << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

void heatmap(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel,
             const std::vector<double>& cols, const std::vector<double>& rows, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::vector<double> mag(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    mag[i] = std::log10(std::max(std::abs(values[i]), 1e-300));
    if (values[i] != 0.0 && std::isfinite(mag[i])) {
      lo = std::min(lo, mag[i]);
      hi = std::max(hi, mag[i]);
    }
  }
  if (!(lo < hi)) {
    lo = std::isfinite(lo) ? lo - 1 : -16;
    hi = lo + 2;
  }
  Frame f{cols.empty() ? 0 : cols.front(), cols.empty() ? 1 : cols.back(), rows.empty() ? 0 : rows.front(),
          rows.empty() ? 1 : rows.back()};
  if (!(f.x0 < f.x1)) f.x1 = f.x0 + 1;
  if (!(f.y0 < f.y1)) f.y1 = f.y0 + 1;

  open(os, title);
  const double cw = (kW - kLeft - kRight) / std::max<std::size_t>(cols.size(), 1);
  const double ch = (kH - kTop - kBottom) / std::max<std::size_t>(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double s = std::clamp((mag[i * cols.size() + j] - lo) / (hi - lo), 0.0, 1.0);
      // white -> dark red
      const int r = static_cast<int>(255 - 100 * s), gb = static_cast<int>(255 * (1 - s));
      os << "<rect x=\"" << kLeft + j * cw << "\" y=\"" << kH - kBottom - (i + 1) * ch << "\" width=\"" << cw + 0.5
         << "\" height=\"" << ch + 0.5 << "\" fill=\"rgb(" << r << ',' << gb << ',' << gb << ")\"/>\n";
    }
  // Axis ticks follow the cell centres' range.
  axes(os, f, xlabel, ylabel);
  os << "<text x=\"" << kW - kRight << "\" y=\"" << kTop - 6 << "\" text-anchor=\"end\">log10 |residual| in ["
     << num(lo) << ", " << num(hi) << "]</text>\n</svg>\n";
}

}  // namespace qbsde::cli::svg
