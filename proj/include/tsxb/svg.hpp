#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "tsxb/common.hpp"

namespace tsxb {

/// Minimal polyline line chart, no plotting dependency. Output is plain SVG
/// with fixed float formatting so identical inputs give identical bytes.
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct SvgChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    int width = 720;
    int height = 460;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string svg_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

inline const char* svg_color(std::size_t i) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                               "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

} // namespace detail

inline void write_svg_chart(const SvgChart& chart, const std::filesystem::path& path) {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool first = true;
    for (const auto& s : chart.series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double ml = 62, mr = 18, mt = 34, mb = 48;
    const double pw = chart.width - ml - mr;
    const double ph = chart.height - mt - mb;
    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
        << chart.height << "\" viewBox=\"0 0 " << chart.width << " " << chart.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << chart.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << chart.title << "</text>\n";

    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / n_ticks;
        const double fy = y_min + (y_max - y_min) * i / n_ticks;
        out << "<line x1=\"" << detail::svg_num(px(fx)) << "\" y1=\"" << detail::svg_num(mt)
            << "\" x2=\"" << detail::svg_num(px(fx)) << "\" y2=\"" << detail::svg_num(mt + ph)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<line x1=\"" << detail::svg_num(ml) << "\" y1=\"" << detail::svg_num(py(fy))
            << "\" x2=\"" << detail::svg_num(ml + pw) << "\" y2=\"" << detail::svg_num(py(fy))
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << detail::svg_num(px(fx)) << "\" y=\""
            << detail::svg_num(mt + ph + 16) << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << detail::svg_tick(fx)
            << "</text>\n";
        out << "<text x=\"" << detail::svg_num(ml - 6) << "\" y=\""
            << detail::svg_num(py(fy) + 4) << "\" text-anchor=\"end\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << detail::svg_tick(fy)
            << "</text>\n";
    }
    out << "<rect x=\"" << detail::svg_num(ml) << "\" y=\"" << detail::svg_num(mt) << "\" width=\""
        << detail::svg_num(pw) << "\" height=\"" << detail::svg_num(ph)
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << chart.width / 2 << "\" y=\"" << chart.height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << chart.x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << chart.height / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << chart.height / 2 << ")\">" << chart.y_label
        << "</text>\n";

    for (std::size_t si = 0; si < chart.series.size(); ++si) {
        const auto& s = chart.series[si];
        out << "<polyline fill=\"none\" stroke=\"" << detail::svg_color(si)
            << "\" stroke-width=\"1.7\" points=\"";
        for (const auto& [x, y] : s.points) {
            out << detail::svg_num(px(x)) << "," << detail::svg_num(py(y)) << " ";
        }
        out << "\"/>\n";
        const double ly = mt + 14 + 16 * static_cast<double>(si);
        out << "<rect x=\"" << detail::svg_num(ml + pw - 150) << "\" y=\""
            << detail::svg_num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
            << detail::svg_color(si) << "\"/>\n";
        out << "<text x=\"" << detail::svg_num(ml + pw - 136) << "\" y=\"" << detail::svg_num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace tsxb
