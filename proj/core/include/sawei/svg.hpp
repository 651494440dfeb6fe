#pragma once

#include <string>
#include <vector>

namespace sawei::svg {

struct Series {
    std::string name;
    // y per step, x = 1..n; nan values break the line.
    std::vector<double> y;
};

struct Marker {
    double x;
    std::string label;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Marker> markers;
    int width = 720;
    int height = 420;
};

// Number of x positions spanned by the longest series.
[[nodiscard]] std::size_t x_extent(const LineChart& chart);

/// Renders polylines, axes, tick labels, a legend and vertical markers.
/// Output is a pure function of the chart contents.
[[nodiscard]] std::string render(const LineChart& chart);

}  // namespace sawei::svg
