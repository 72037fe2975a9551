#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fovqa {

struct ScatterSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Static scatter plot: one marker shape per series plus an optional fitted
// curve, with axes, ticks and a legend. Rendering is deterministic.
struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ScatterSeries> series;
  std::vector<std::pair<double, double>> curve;
};

std::string render_scatter_svg(const ScatterPlot& plot);

}  // namespace fovqa
