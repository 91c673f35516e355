#pragma once

#include <string>
#include <vector>

namespace edc::io {

struct ChartPoint {
    double x = 0.0;
    double y = 0.0;
    double error = 0.0;  // half-height of the error bar
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartPoint> points;
};

/// Standalone SVG document: one polyline with markers and error bars.
std::string render_svg(const LineChart& chart);

}  // namespace edc::io
