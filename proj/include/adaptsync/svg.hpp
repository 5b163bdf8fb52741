#pragma once

// Minimal stacked line-chart SVG writer for c(t) / E(t) diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace adaptsync::svg {

struct Panel {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

} // namespace detail

/// One panel per entry, stacked vertically, shared width. Non-finite points
/// are skipped; long series are thinned to at most `max_points`.
inline void write_panels(std::ostream& os, const std::string& title, const std::vector<Panel>& panels,
                         std::size_t max_points = 2000) {
    constexpr double width = 640, panel_h = 220, margin_l = 70, margin_r = 20, margin_t = 40, gap = 50;
    const double height = margin_t + static_cast<double>(panels.size()) * (panel_h + gap);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::escape(title) << "</text>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& panel = panels[p];
        const double top = margin_t + static_cast<double>(p) * (panel_h + gap);
        const double plot_w = width - margin_l - margin_r;

        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        const std::size_t n = std::min(panel.xs.size(), panel.ys.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(panel.xs[i]) || !std::isfinite(panel.ys[i])) continue;
            x0 = std::min(x0, panel.xs[i]);
            x1 = std::max(x1, panel.xs[i]);
            y0 = std::min(y0, panel.ys[i]);
            y1 = std::max(y1, panel.ys[i]);
        }
        if (!(x1 >= x0)) x0 = 0, x1 = 1;
        if (!(y1 >= y0)) y0 = 0, y1 = 1;
        if (x1 == x0) x1 = x0 + 1;
        if (y1 == y0) y1 = y0 + 1;

        const auto px = [&](double x) { return margin_l + (x - x0) / (x1 - x0) * plot_w; };
        const auto py = [&](double y) { return top + panel_h - (y - y0) / (y1 - y0) * panel_h; };

        os << "<rect x=\"" << margin_l << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << panel_h
           << "\" fill=\"none\" stroke=\"#444\"/>\n";
        os << "<text x=\"" << margin_l - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << detail::fmt(y1)
           << "</text>\n";
        os << "<text x=\"" << margin_l - 6 << "\" y=\"" << top + panel_h << "\" text-anchor=\"end\">"
           << detail::fmt(y0) << "</text>\n";
        os << "<text x=\"" << margin_l << "\" y=\"" << top + panel_h + 14 << "\">" << detail::fmt(x0) << "</text>\n";
        os << "<text x=\"" << margin_l + plot_w << "\" y=\"" << top + panel_h + 14 << "\" text-anchor=\"end\">"
           << detail::fmt(x1) << "</text>\n";
        os << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << top + panel_h + 28
           << "\" text-anchor=\"middle\">t</text>\n";
        os << "<text x=\"16\" y=\"" << top + panel_h / 2 << "\" transform=\"rotate(-90 16 " << top + panel_h / 2
           << ")\" text-anchor=\"middle\">" << detail::escape(panel.label) << "</text>\n";

        const std::size_t stride = n > max_points ? (n + max_points - 1) / max_points : 1;
        os << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(panel.xs[i]) || !std::isfinite(panel.ys[i])) continue;
            os << detail::fmt(px(panel.xs[i])) << ',' << detail::fmt(py(panel.ys[i])) << ' ';
        }
        if (n > 0 && (n - 1) % stride != 0 && std::isfinite(panel.ys[n - 1])) {
            os << detail::fmt(px(panel.xs[n - 1])) << ',' << detail::fmt(py(panel.ys[n - 1]));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace adaptsync::svg
