#include "sklpca/svg_plot.hpp"

#include "sklpca/csv_io.hpp"
#include "sklpca/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sklpca {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& text) {
    std::string out;
    for (const char c : text) {
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

std::string num(double v) {
    // Two decimals keep files small and stable.
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

} // namespace

std::string scatter_svg(const std::vector<ScatterPoint>& points, const ScatterOptions& options) {
    if (points.empty()) {
        throw InputError("plot: no points to draw");
    }
    double lo_x = points.front().x, hi_x = lo_x, lo_y = points.front().y, hi_y = lo_y;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InputError("plot: non-finite coordinate");
        }
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    if (options.identity_line) {
        // Shared range so y = x is the diagonal.
        lo_x = lo_y = std::min(lo_x, lo_y);
        hi_x = hi_y = std::max(hi_x, hi_y);
    }
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double margin = span > 0.0 ? 0.05 * span : std::max(0.5, std::abs(lo) * 0.05);
        lo -= margin;
        hi += margin;
    };
    pad(lo_x, hi_x);
    pad(lo_y, hi_y);

    const double left = 70, right = 20, top = 40, bottom = 60;
    const double w = options.width - left - right;
    const double h = options.height - top - bottom;
    auto sx = [&](double x) { return left + (x - lo_x) / (hi_x - lo_x) * w; };
    auto sy = [&](double y) { return top + (hi_y - y) / (hi_y - lo_y) * h; };

    std::map<std::string, std::size_t> colour;
    for (const auto& p : points) {
        colour.emplace(p.group, 0);
    }
    std::size_t k = 0;
    for (auto& [group, idx] : colour) {
        idx = k++ % std::size(kPalette);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = lo_x + (hi_x - lo_x) * t / 4.0;
        const double fy = lo_y + (hi_y - lo_y) * t / 4.0;
        svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(top + h + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(format_double(std::round(fx * 100) / 100))
            << "</text>\n";
        svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(fy) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << escape(format_double(std::round(fy * 100) / 100))
            << "</text>\n";
    }
    if (options.identity_line) {
        svg << "<line x1=\"" << num(sx(lo_x)) << "\" y1=\"" << num(sy(lo_x)) << "\" x2=\"" << num(sx(hi_x))
            << "\" y2=\"" << num(sy(hi_x)) << "\" stroke=\"#444\" stroke-dasharray=\"5,4\"/>\n";
    }
    for (const auto& p : points) {
        svg << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"2.5\" fill=\""
            << kPalette[colour.at(p.group)] << "\" fill-opacity=\"0.75\"/>\n";
    }
    if (options.legend && colour.size() <= 12) {
        double y = top + 14;
        for (const auto& [group, idx] : colour) {
            svg << "<circle cx=\"" << num(left + 12) << "\" cy=\"" << num(y - 4) << "\" r=\"4\" fill=\""
                << kPalette[idx] << "\"/>\n";
            svg << "<text x=\"" << num(left + 22) << "\" y=\"" << num(y) << "\" font-size=\"11\">" << escape(group)
                << "</text>\n";
            y += 15;
        }
    }
    svg << "<text x=\"" << num(options.width / 2.0) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
        << escape(options.title) << "</text>\n";
    svg << "<text x=\"" << num(left + w / 2) << "\" y=\"" << num(options.height - 16.0)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(options.x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << num(top + h / 2) << ") rotate(-90)\" font-size=\"12\""
        << " text-anchor=\"middle\">" << escape(options.y_label) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace sklpca
