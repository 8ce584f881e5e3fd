#pragma once

// Minimal deterministic SVG charts: scatter plots and (log-scale) line charts.

#include <string>
#include <utility>
#include <vector>

namespace potlab::svg {

struct Bounds {
    double xmin = -1.0;
    double xmax = 1.0;
    double ymin = -1.0;
    double ymax = 1.0;
};

struct PointSeries {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

struct LineSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// One <circle> per point, mapped affinely from `bounds` onto the plot area.
std::string scatter(const std::string& title, const std::vector<PointSeries>& series, const Bounds& bounds);

/// One <polyline> per series; y is plotted as log10|y| when log_y is set
/// (non-positive values are dropped).
std::string line_chart(const std::string& title, const std::vector<LineSeries>& series, bool log_y);

}  // namespace potlab::svg
