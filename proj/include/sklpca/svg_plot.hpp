#pragma once

#include <string>
#include <vector>

namespace sklpca {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string group; ///< points sharing a group share a colour
};

struct ScatterOptions {
    std::string title;
    std::string x_label = "observed";
    std::string y_label = "predicted";
    bool identity_line = true;
    bool legend = false; ///< only drawn for up to 12 groups
    int width = 640;
    int height = 640;
};

/// Self-contained SVG document with axes, optional y = x line and one
/// colour per group (palette cycles after 10 groups).
[[nodiscard]] std::string scatter_svg(const std::vector<ScatterPoint>& points, const ScatterOptions& options);

} // namespace sklpca
