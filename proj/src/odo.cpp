#include "tps/odo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tps {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= double(i);
    return f;
}

}  // namespace

void validate_odo(const Odo& odo) {
    if (odo.order < 1) throw std::invalid_argument("Odo: order must be >= 1");
    if (!std::isfinite(odo.alpha)) throw std::invalid_argument("Odo: alpha must be finite");
}

double exp_monomial(double alpha, int k, double s) {
    if (k == 0) return std::exp(alpha * s);  // 0^0 = 1 convention at s = 0
    return std::pow(s, double(k)) * std::exp(alpha * s) / factorial(k);
}

double green_eval(const Odo& odo, double t) {
    if (t < 0.0) return 0.0;
    return exp_monomial(odo.alpha, odo.order - 1, t);
}

double nullspace_eval(const Odo& odo, int n, double anchor, double t) {
    if (n < 1 || n > odo.order)
        throw std::out_of_range("nullspace_eval: index n must be in 1..N, got " +
                                std::to_string(n));
    return exp_monomial(odo.alpha, n - 1, t - anchor);
}

PiecewisePolyExp green_ppe(const Odo& odo, double knot) {
    std::vector<double> coeffs(std::size_t(odo.order), 0.0);
    coeffs[std::size_t(odo.order) - 1] = 1.0 / factorial(odo.order - 1);
    return PiecewisePolyExp::exp_poly_on(
        Interval{knot, std::numeric_limits<double>::infinity()}, std::move(coeffs), odo.alpha,
        knot);
}

PiecewisePolyExp exp_monomial_ppe(const Odo& odo, double shift) {
    std::vector<double> coeffs(std::size_t(odo.order), 0.0);
    coeffs[std::size_t(odo.order) - 1] = 1.0 / factorial(odo.order - 1);
    return PiecewisePolyExp::exp_poly(std::move(coeffs), odo.alpha, shift);
}

PiecewisePolyExp nullspace_ppe(const Odo& odo, int n, double anchor) {
    if (n < 1 || n > odo.order)
        throw std::out_of_range("nullspace_ppe: index n must be in 1..N");
    std::vector<double> coeffs(std::size_t(n), 0.0);
    coeffs[std::size_t(n) - 1] = 1.0 / factorial(n - 1);
    return PiecewisePolyExp::exp_poly(std::move(coeffs), odo.alpha, anchor);
}

PiecewisePolyExp apply_adjoint(const Odo& odo, const PiecewisePolyExp& f) {
    // (-D - alpha I)^N applied piecewise
    PiecewisePolyExp g = f;
    for (int i = 0; i < odo.order; ++i) g = g.derivative().scaled(-1.0) - g.scaled(odo.alpha);
    return g;
}

PiecewisePolyExp apply_operator_power(const Odo& odo, int k, const PiecewisePolyExp& f) {
    PiecewisePolyExp g = f;
    for (int i = 0; i < k; ++i) g = g.derivative() - g.scaled(odo.alpha);
    return g;
}

}  // namespace tps
