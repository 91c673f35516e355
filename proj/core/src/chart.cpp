#include "edcuav/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace edc::io {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double span() const { return hi - lo; }
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo) * 0.1);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string render_svg(const LineChart& chart) {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!chart.points.empty()) {
        x_lo = x_hi = chart.points.front().x;
        y_lo = y_hi = chart.points.front().y;
        for (const auto& p : chart.points) {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, p.y - std::abs(p.error));
            y_hi = std::max(y_hi, p.y + std::abs(p.error));
        }
    }
    const Range xr = padded(x_lo, x_hi);
    const Range yr = padded(std::min(0.0, y_lo), y_hi);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / xr.span() * plot_w; };
    auto sy = [&](double y) { return kTop + plot_h - (y - yr.lo) / yr.span() * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(chart.title) << "</text>\n";

    // Axes, ticks and labels.
    svg << "<g stroke=\"black\">\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(kTop + plot_h) << "\"/>\n";
    svg << "</g>\n";
    for (const auto& p : chart.points) {
        svg << "<text x=\"" << num(sx(p.x)) << "\" y=\"" << num(kTop + plot_h + 18)
            << "\" text-anchor=\"middle\">" << label(p.x) << "</text>\n";
    }
    constexpr int kYTicks = 5;
    for (int i = 0; i <= kYTicks; ++i) {
        const double v = yr.lo + yr.span() * i / kYTicks;
        svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
            << num(sy(v)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(v) + 4) << "\" text-anchor=\"end\">"
            << label(std::round(v * 1000.0) / 1000.0) << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 14)
        << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
    svg << "<text transform=\"translate(16," << num(kTop + plot_h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

    // Series.
    if (!chart.points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < chart.points.size(); ++i) {
            if (i) svg << ' ';
            svg << num(sx(chart.points[i].x)) << ',' << num(sy(chart.points[i].y));
        }
        svg << "\"/>\n";
    }
    for (const auto& p : chart.points) {
        const double x = sx(p.x);
        if (p.error > 0.0) {
            const double top = sy(p.y + p.error);
            const double bottom = sy(p.y - p.error);
            svg << "<g stroke=\"#555\">";
            svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top) << "\" x2=\"" << num(x) << "\" y2=\""
                << num(bottom) << "\"/>";
            svg << "<line x1=\"" << num(x - 5) << "\" y1=\"" << num(top) << "\" x2=\"" << num(x + 5) << "\" y2=\""
                << num(top) << "\"/>";
            svg << "<line x1=\"" << num(x - 5) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x + 5)
                << "\" y2=\"" << num(bottom) << "\"/>";
            svg << "</g>\n";
        }
        svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace edc::io
