#include "tps/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tps/errors.hpp"

namespace tps {

namespace {

struct Window {
    double x0, x1, y0, y1;
};

Window make_window(const TensorSpline& s, const RenderOptions& opt) {
    if (opt.has_window) return {opt.x0, opt.x1, opt.y0, opt.y1};
    const Rect& dom = s.domain();
    const double pad1 = 0.25 * dom.k1.length();
    const double pad2 = 0.25 * dom.k2.length();
    return {dom.k1.lo - pad1, dom.k1.hi + pad1, dom.k2.lo - pad2, dom.k2.hi + pad2};
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// small viridis-style lookup, linearly interpolated
constexpr int kStops = 7;
constexpr double kLut[kStops][3] = {{68, 1, 84},    {65, 68, 135},  {42, 120, 142},
                                    {34, 168, 132}, {122, 209, 81}, {226, 228, 40},
                                    {253, 231, 37}};

std::string color_of(double v, double lo, double hi) {
    double u = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
    u = std::min(std::max(u, 0.0), 1.0);
    const double pos = u * (kStops - 1);
    const int i = std::min(int(pos), kStops - 2);
    const double f = pos - i;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  int(std::lround(kLut[i][0] + f * (kLut[i + 1][0] - kLut[i][0]))),
                  int(std::lround(kLut[i][1] + f * (kLut[i + 1][1] - kLut[i][1]))),
                  int(std::lround(kLut[i][2] + f * (kLut[i + 1][2] - kLut[i][2]))));
    return buf;
}

void value_range(const std::vector<double>& values, double& lo, double& hi) {
    lo = 0.0;
    hi = 0.0;
    if (!values.empty()) {
        lo = *std::min_element(values.begin(), values.end());
        hi = *std::max_element(values.begin(), values.end());
    }
    if (hi <= lo) hi = lo + 1.0;
}

/// Emits one heatmap panel (with run-length merged rows) into `os`, mapping
/// the window to the pixel box [ox, ox+size] x [oy, oy+size].
void emit_panel(std::ostringstream& os, const TensorSpline& s, const std::vector<double>& values,
                int raster, double lo, double hi, const Window& win, double ox, double oy,
                double size, bool markers) {
    const double cell = size / raster;
    for (int row = 0; row < raster; ++row) {
        int col = 0;
        while (col < raster) {
            const std::string color = color_of(values[std::size_t(row * raster + col)], lo, hi);
            int run = 1;
            while (col + run < raster &&
                   color_of(values[std::size_t(row * raster + col + run)], lo, hi) == color)
                ++run;
            os << "<rect x=\"" << px(ox + col * cell) << "\" y=\"" << px(oy + row * cell)
               << "\" width=\"" << px(run * cell + 0.01) << "\" height=\"" << px(cell + 0.01)
               << "\" fill=\"" << color << "\"/>\n";
            col += run;
        }
    }
    // dotted domain boundary
    auto sx = [&](double t1) { return ox + (t1 - win.x0) / (win.x1 - win.x0) * size; };
    auto sy = [&](double t2) { return oy + (win.y1 - t2) / (win.y1 - win.y0) * size; };
    const Rect& dom = s.domain();
    os << "<rect x=\"" << px(sx(dom.k1.lo)) << "\" y=\"" << px(sy(dom.k2.hi)) << "\" width=\""
       << px(sx(dom.k1.hi) - sx(dom.k1.lo)) << "\" height=\"" << px(sy(dom.k2.lo) - sy(dom.k2.hi))
       << "\" fill=\"none\" stroke=\"#202020\" stroke-width=\"1.2\" stroke-dasharray=\"4 3\"/>\n";
    if (!markers) return;
    for (const auto& a : s.atoms()) {
        switch (a.family) {
            case AtomFamily::TensorGreen:
                os << "<circle cx=\"" << px(sx(a.x1)) << "\" cy=\"" << px(sy(a.x2))
                   << "\" r=\"2.5\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"0.8\""
                   << " class=\"knot-tensor\"/>\n";
                break;
            case AtomFamily::PolyGreen: {
                // horizontal knot line t2 = y: triangle on the left edge
                const double cy = sy(a.x2);
                os << "<path d=\"M" << px(ox) << " " << px(cy - 3) << " L" << px(ox + 5) << " "
                   << px(cy) << " L" << px(ox) << " " << px(cy + 3)
                   << " Z\" fill=\"#d62728\" class=\"knot-axis2\"/>\n";
                break;
            }
            case AtomFamily::GreenPoly: {
                // vertical knot line t1 = z: triangle on the bottom edge
                const double cx = sx(a.x1);
                os << "<path d=\"M" << px(cx - 3) << " " << px(oy + size) << " L" << px(cx) << " "
                   << px(oy + size - 5) << " L" << px(cx + 3) << " " << px(oy + size)
                   << " Z\" fill=\"#1f77b4\" class=\"knot-axis1\"/>\n";
                break;
            }
            case AtomFamily::PolyPoly:
                break;
        }
    }
}

}  // namespace

std::vector<double> raster_values(const TensorSpline& s, const RenderOptions& opt) {
    const Window win = make_window(s, opt);
    const int n = opt.raster;
    std::vector<double> values(std::size_t(n) * std::size_t(n), 0.0);
    for (int row = 0; row < n; ++row) {
        const double t2 = win.y1 - (row + 0.5) * (win.y1 - win.y0) / n;
        for (int col = 0; col < n; ++col) {
            const double t1 = win.x0 + (col + 0.5) * (win.x1 - win.x0) / n;
            values[std::size_t(row * n + col)] = eval(s, t1, t2);
        }
    }
    return values;
}

std::string render_heatmap_svg(const TensorSpline& s, const RenderOptions& opt) {
    const Window win = make_window(s, opt);
    const std::vector<double> values = raster_values(s, opt);
    double lo, hi;
    value_range(values, lo, hi);
    const double size = 480.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
          "viewBox=\"0 0 480 480\">\n";
    emit_panel(os, s, values, opt.raster, lo, hi, win, 0.0, 0.0, size, true);
    os << "</svg>\n";
    return os.str();
}

std::string render_decomposition_svg(const TensorSpline& s, const RenderOptions& opt) {
    const Window win = make_window(s, opt);
    const std::vector<double> full = raster_values(s, opt);
    double lo, hi;
    value_range(full, lo, hi);
    const auto parts = decompose(s);
    const double size = 236.0;
    const double gap = 8.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
          "viewBox=\"0 0 480 480\">\n";
    for (int i = 0; i < 4; ++i) {
        const double ox = (i % 2) * (size + gap);
        const double oy = (i / 2) * (size + gap);
        const std::vector<double> values = raster_values(parts[std::size_t(i)], opt);
        emit_panel(os, parts[std::size_t(i)], values, opt.raster, lo, hi, win, ox, oy, size,
                   false);
    }
    os << "</svg>\n";
    return os.str();
}

std::map<std::string, std::string> render_document(const ProblemDocument& doc,
                                                   const RenderOptions& opt) {
    if (doc.mode != "tensor2d")
        throw DocumentError("render: only tensor2d documents have plots");
    const TensorSpline spline = doc.solution       ? doc.solution_spline()
                                : doc.ground_truth ? doc.ground_truth_spline()
                                                   : throw DocumentError(
                                                         "render: document has no spline");
    std::map<std::string, std::string> files;
    files["spline.svg"] = render_heatmap_svg(spline, opt);
    files["decomposition.svg"] = render_decomposition_svg(spline, opt);
    return files;
}

}  // namespace tps
