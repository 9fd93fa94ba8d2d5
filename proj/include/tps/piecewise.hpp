#pragma once

#include <optional>
#include <vector>

namespace tps {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool contains(double t) const { return lo <= t && t <= hi; }
    bool contains_open(double t) const { return lo < t && t < hi; }
};

/// Throws std::invalid_argument unless lo < hi and both ends are finite.
void validate_interval(const Interval& k, const char* what);

/// One exponential-polynomial summand: sum_j coeffs[j] * s^j * exp(rate * s),
/// in the piece-local variable s = t - origin.
struct ExpPolyTerm {
    double rate = 0.0;
    std::vector<double> coeffs;
};

struct PpePiece {
    double lo = 0.0;     // piece covers [lo, hi); lo may be -inf
    double hi = 0.0;     // hi may be +inf
    double origin = 0.0; // finite local expansion point
    std::vector<ExpPolyTerm> terms;

    double eval_local(double s) const;
};

/// Piecewise sums of polynomial-times-exponential functions, zero outside the
/// listed pieces. Closed under addition, scaling, shifting, differentiation,
/// multiplication, and exact integration, which is what makes every inner
/// product in the operator toolkit closed-form.
class PiecewisePolyExp {
public:
    PiecewisePolyExp() = default;

    /// c * (t - origin)^k * exp(rate * (t - origin)) summed per coefficient,
    /// supported on the whole line.
    static PiecewisePolyExp exp_poly(std::vector<double> coeffs, double rate, double origin);

    /// Same as exp_poly but restricted to [support.lo, support.hi).
    static PiecewisePolyExp exp_poly_on(Interval support, std::vector<double> coeffs,
                                        double rate, double origin);

    static PiecewisePolyExp constant(double value);

    /// Polynomial bump (t-a)^order * (b-t)^order on [a, b], zero elsewhere.
    /// Vanishes to `order` at both ends, so it is C^{order-1} on the line.
    static PiecewisePolyExp bump(Interval support, int order);

    bool is_zero() const { return pieces_.empty(); }

    double eval(double t) const;       // right-continuous at breakpoints
    double eval_left(double t) const;  // left limit

    PiecewisePolyExp derivative() const;
    PiecewisePolyExp derivative(int times) const;

    /// Exact integral over [a, b]; returns exactly 0 when b <= a.
    double integrate(double a, double b) const;

    PiecewisePolyExp scaled(double c) const;
    PiecewisePolyExp shifted(double delta) const;  // t -> f(t - delta)
    PiecewisePolyExp restricted(Interval window) const;

    PiecewisePolyExp operator+(const PiecewisePolyExp& other) const;
    PiecewisePolyExp operator-(const PiecewisePolyExp& other) const;
    PiecewisePolyExp operator*(const PiecewisePolyExp& other) const;

    /// Hull of the support; entries may be infinite. nullopt for the zero function.
    std::optional<Interval> support() const;

    const std::vector<PpePiece>& pieces() const { return pieces_; }

    /// Assembles pieces given in any order; normalizes and validates disjointness.
    static PiecewisePolyExp from_pieces(std::vector<PpePiece> pieces);

private:
    std::vector<PpePiece> pieces_;  // sorted by lo, pairwise disjoint
};

/// Exact ∫ f·g over the (required finite) overlap of the supports.
double inner_product(const PiecewisePolyExp& f, const PiecewisePolyExp& g);

/// Stable ∫_{s0}^{s1} (sum_k coeffs[k] s^k) e^{rate s} ds.
double exp_poly_integral(const std::vector<double>& coeffs, double rate, double s0, double s1);

}  // namespace tps
