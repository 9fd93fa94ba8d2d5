#pragma once

#include <functional>

namespace tps {

/// Adaptive Gauss-Legendre quadrature on [a, b]. Bisects until the 7-point and
/// 15-point estimates agree to abs_tol on each panel, up to max_depth levels.
/// Deterministic for a given integrand.
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, int max_depth = 40);

/// Nested 2D version over [a1,b1] x [a2,b2].
double adaptive_quadrature_2d(const std::function<double(double, double)>& f, double a1,
                              double b1, double a2, double b2, double abs_tol = 1e-9,
                              int max_depth = 40);

}  // namespace tps
