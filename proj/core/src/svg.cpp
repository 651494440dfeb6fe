#include "sawei/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sawei::svg {

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf"};

constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string tick(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::size_t x_extent(const LineChart& chart) {
    std::size_t n = 0;
    for (const auto& s : chart.series) {
        n = std::max(n, s.y.size());
    }
    return n;
}

std::string render(const LineChart& chart) {
    const std::size_t n = x_extent(chart);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : chart.series) {
        for (const double v : s.y) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double plot_w = chart.width - kLeft - kRight;
    const double plot_h = chart.height - kTop - kBottom;
    const double x_span = n > 1 ? static_cast<double>(n - 1) : 1.0;
    const auto px = [&](double x) { return kLeft + (x - 1.0) / x_span * plot_w; };
    const auto py = [&](double y) { return kTop + (hi - y) / (hi - lo) * plot_h; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(chart.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(chart.title) << "</text>\n";
    o << "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
    o << "<path d=\"M" << fixed(kLeft) << ' ' << fixed(kTop) << " V" << fixed(kTop + plot_h)
      << " H" << fixed(kLeft + plot_w) << "\"/>\n</g>\n";

    o << "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        o << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(v) + 4)
          << "\" text-anchor=\"end\">" << tick(v) << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double x = 1.0 + x_span * k / 4.0;
        o << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(kTop + plot_h + 16)
          << "\" text-anchor=\"middle\">" << tick(std::round(x)) << "</text>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << chart.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(16 " << fixed(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape(chart.y_label) << "</text>\n";

    for (const auto& m : chart.markers) {
        o << "<g class=\"marker\"><path d=\"M" << fixed(px(m.x)) << ' ' << fixed(kTop) << " V"
          << fixed(kTop + plot_h) << "\" stroke=\"#444\" stroke-dasharray=\"4 3\" fill=\"none\"/>"
          << "<text x=\"" << fixed(px(m.x) + 3) << "\" y=\"" << fixed(kTop + 12)
          << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(m.label)
          << "</text></g>\n";
    }

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % kPalette.size()];
        std::vector<std::string> segments;
        std::string current;
        std::size_t points = 0;
        for (std::size_t k = 0; k < s.y.size(); ++k) {
            if (!std::isfinite(s.y[k])) {
                if (!current.empty()) {
                    segments.push_back(current);
                }
                current.clear();
                continue;
            }
            current += (current.empty() ? "" : " ") + fixed(px(static_cast<double>(k + 1))) + "," +
                       fixed(py(s.y[k]));
            ++points;
        }
        if (!current.empty()) {
            segments.push_back(current);
        }
        o << "<g class=\"series\" data-name=\"" << escape(s.name) << "\" data-points=\"" << points
          << "\">\n";
        for (const auto& seg : segments) {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
              << seg << "\"/>\n";
        }
        o << "</g>\n";
        const double ly = kTop + 14.0 * static_cast<double>(i) + 6.0;
        o << "<path d=\"M" << fixed(kLeft + plot_w + 12) << ' ' << fixed(ly) << " h18\" stroke=\""
          << color << "\" stroke-width=\"2\"/><text x=\"" << fixed(kLeft + plot_w + 34)
          << "\" y=\"" << fixed(ly + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace sawei::svg
