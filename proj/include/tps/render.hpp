#pragma once

#include <map>
#include <string>
#include <vector>

#include "tps/document.hpp"

namespace tps {

struct RenderOptions {
    int raster = 256;  // heatmap resolution per axis
    // extended plotting window; defaults to the domain padded by a quarter of
    // its side length on every edge
    bool has_window = false;
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

/// Row-major sample grid of the spline on the window (row 0 = top).
std::vector<double> raster_values(const TensorSpline& s, const RenderOptions& opt);

/// Deterministic SVG heatmap with per-family knot markers and the dotted
/// domain boundary.
std::string render_heatmap_svg(const TensorSpline& s, const RenderOptions& opt);

/// Four-panel direct-sum decomposition on a shared color scale.
std::string render_decomposition_svg(const TensorSpline& s, const RenderOptions& opt);

/// Renders the document's solution (or ground truth when no solution is
/// present) into {"spline.svg": ..., "decomposition.svg": ...}.
std::map<std::string, std::string> render_document(const ProblemDocument& doc,
                                                   const RenderOptions& opt);

}  // namespace tps
