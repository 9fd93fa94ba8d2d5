#pragma once

#include "tps/piecewise.hpp"

namespace tps {

/// One-dimensional differential operator (D - alpha I)^N with a single root.
struct Odo {
    double alpha = 0.0;
    int order = 1;
};

/// Throws std::invalid_argument unless order >= 1 and alpha is finite.
void validate_odo(const Odo& odo);

/// The exponential monomial E_k(s) = s^{k} e^{alpha s} / k!, defined on the
/// whole line. green_eval and nullspace_eval share this code path so that
/// identities such as g(t - K^-) = p_N(t) on t >= K^- hold bit-exactly.
double exp_monomial(double alpha, int k, double s);

/// Causal Green's function: 0 for t < 0, t^{N-1} e^{alpha t}/(N-1)! otherwise,
/// with the 0^0 = 1 convention at t = 0 for N = 1.
double green_eval(const Odo& odo, double t);

/// Null-space basis element p_n(t) = (t-anchor)^{n-1} e^{alpha (t-anchor)}/(n-1)!,
/// n in 1..N.
double nullspace_eval(const Odo& odo, int n, double anchor, double t);

/// g_L(. - knot) as a piecewise function (single piece [knot, inf)).
PiecewisePolyExp green_ppe(const Odo& odo, double knot);

/// E_{N-1}(. - shift) on the whole line (the exponential-polynomial extension
/// of the Green's function).
PiecewisePolyExp exp_monomial_ppe(const Odo& odo, double shift);

/// p_n(. ) anchored at `anchor`, on the whole line.
PiecewisePolyExp nullspace_ppe(const Odo& odo, int n, double anchor);

/// Symbolic adjoint application: L* f = (-D - alpha I)^N f.
PiecewisePolyExp apply_adjoint(const Odo& odo, const PiecewisePolyExp& f);

/// Symbolic (D - alpha I)^k f.
PiecewisePolyExp apply_operator_power(const Odo& odo, int k, const PiecewisePolyExp& f);

}  // namespace tps
