#pragma once

#include <string>
#include <vector>

namespace cqed::cli {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG line plot: axes with tick labels, one polyline per
/// series, legend in the top-right corner. Non-finite points are skipped.
std::string render_svg(const PlotSpec& plot);

}  // namespace cqed::cli
