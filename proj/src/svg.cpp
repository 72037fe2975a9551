#include "fovqa/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fovqa {

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 48;

const char* kSeriesColor[] = {"#1f6fb2", "#c2542e", "#3a8f5c", "#8456a8"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Range {
  double lo = 0, hi = 1;
  double span() const { return hi - lo; }
};

Range axis_range(double lo, double hi) {
  if (!(lo < hi)) {
    const double pad = std::max(std::abs(lo), 1.0) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.06;
  return {lo - pad, hi + pad};
}

}  // namespace

std::string render_scatter_svg(const ScatterPlot& plot) {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (!any) {
      x_lo = x_hi = x;
      y_lo = y_hi = y;
      any = true;
    } else {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  };
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) grow(x, y);
  for (const auto& [x, y] : plot.curve) grow(x, y);

  const Range rx = axis_range(x_lo, x_hi), ry = axis_range(y_lo, y_hi);
  auto sx = [&](double x) { return kLeft + (x - rx.lo) / rx.span() * (kWidth - kLeft - kRight); };
  auto sy = [&](double y) {
    return kHeight - kBottom - (y - ry.lo) / ry.span() * (kHeight - kTop - kBottom);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" font-family=\"sans-serif\" "
      << "font-size=\"15\" text-anchor=\"middle\">" << plot.title << "</text>\n";

  // Axes with 5 ticks each.
  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
      << num(kWidth - kRight) << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = rx.lo + rx.span() * t / 4.0;
    const double fy = ry.lo + ry.span() * t / 4.0;
    out << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
        << num(sx(fx)) << "\" y2=\"" << num(kHeight - kBottom + 5) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kHeight - kBottom + 18)
        << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy(fy)) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(sy(fy)) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(fy) + 4)
        << "\" text-anchor=\"end\">" << tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">" << plot.x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((kTop + kHeight - kBottom) / 2) << ")\">" << plot.y_label << "</text>\n";
  out << "</g>\n";

  if (plot.curve.size() >= 2) {
    auto curve = plot.curve;
    std::sort(curve.begin(), curve.end());
    out << "<polyline fill=\"none\" stroke=\"#444\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : curve) out << num(sx(x)) << "," << num(sy(y)) << " ";
    out << "\"/>\n";
  }

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = kSeriesColor[s % 4];
    out << "<g fill=\"" << color << "\" fill-opacity=\"0.75\">\n";
    for (const auto& [x, y] : plot.series[s].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (s % 2 == 0) {
        out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3.5\"/>\n";
      } else {
        out << "<rect x=\"" << num(sx(x) - 3) << "\" y=\"" << num(sy(y) - 3)
            << "\" width=\"6\" height=\"6\"/>\n";
      }
    }
    out << "</g>\n";
  }

  // Legend in the top-right corner.
  double ly = kTop + 8;
  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = kSeriesColor[s % 4];
    const double lx = kWidth - kRight - 120;
    if (s % 2 == 0)
      out << "<circle cx=\"" << num(lx) << "\" cy=\"" << num(ly) << "\" r=\"3.5\" fill=\"" << color
          << "\"/>\n";
    else
      out << "<rect x=\"" << num(lx - 3) << "\" y=\"" << num(ly - 3)
          << "\" width=\"6\" height=\"6\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << num(lx + 10) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">" << plot.series[s].label
        << "</text>\n";
    ly += 18;
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace fovqa
