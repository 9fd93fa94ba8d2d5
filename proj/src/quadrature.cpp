#include "tps/quadrature.hpp"

#include <array>
#include <cmath>

namespace tps {

namespace {

// 7-point Lobatto-Kronrod rule on [-1, 1] (endpoints included, exact to
// degree 9). Endpoint nodes make edge-hugging discontinuities visible, which
// open Gauss rules can miss entirely.
const std::array<double, 7> kNodes = {-1.0,
                                      -0.8164965809277260327324,  // -sqrt(2/3)
                                      -0.4472135954999579392818,  // -1/sqrt(5)
                                      0.0,
                                      0.4472135954999579392818,
                                      0.8164965809277260327324,
                                      1.0};
const std::array<double, 7> kWeights = {11.0 / 210.0, 72.0 / 245.0, 125.0 / 294.0, 16.0 / 35.0,
                                        125.0 / 294.0, 72.0 / 245.0, 11.0 / 210.0};

struct PanelEstimate {
    double integral = 0.0;
    double magnitude = 0.0;  // integral of |f|, the round-off scale
};

PanelEstimate panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    PanelEstimate est;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
        const double v = f(c + h * kNodes[i]);
        est.integral += kWeights[i] * v;
        est.magnitude += kWeights[i] * std::abs(v);
    }
    est.integral *= h;
    est.magnitude *= h;
    return est;
}

/// Parent-versus-children error estimate: a panel is accepted only when its
/// estimate agrees with the sum of its halves, so structure invisible at one
/// level is caught at the next. The first `force` levels split
/// unconditionally; narrow features can otherwise slip between the nodes of
/// two agreeing coarse panels. noise_floor is a fixed round-off scale for the
/// whole integral; without it, panels whose true error sits at machine noise
/// would keep splitting to full depth.
double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, double noise_floor, int depth, int force) {
    const double mid = 0.5 * (a + b);
    const PanelEstimate left = panel(f, a, mid);
    const PanelEstimate right = panel(f, mid, b);
    const double refined = left.integral + right.integral;
    const double err = std::abs(refined - whole);
    if (depth <= 0) return refined;
    if (force <= 0 && (err <= tol || err <= noise_floor)) return refined;
    return adapt(f, a, mid, left.integral, 0.5 * tol, noise_floor, depth - 1, force - 1) +
           adapt(f, mid, b, right.integral, 0.5 * tol, noise_floor, depth - 1, force - 1);
}

}  // namespace

double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    const PanelEstimate top = panel(f, a, b);
    const double noise_floor = 1e-15 * top.magnitude;
    return adapt(f, a, b, top.integral, abs_tol, noise_floor, max_depth, 5);
}

double adaptive_quadrature_2d(const std::function<double(double, double)>& f, double a1,
                              double b1, double a2, double b2, double abs_tol, int max_depth) {
    if (!(b1 > a1) || !(b2 > a2)) return 0.0;
    auto outer = [&](double t1) {
        return adaptive_quadrature([&](double t2) { return f(t1, t2); }, a2, b2,
                                   0.1 * abs_tol / (b1 - a1), max_depth);
    };
    return adaptive_quadrature(outer, a1, b1, abs_tol, max_depth);
}

}  // namespace tps
