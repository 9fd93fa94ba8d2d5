#include <doctest.h>

#include <cmath>

#include "tps/piecewise.hpp"
#include "tps/quadrature.hpp"
#include "tps/rng.hpp"

using namespace tps;

TEST_CASE("closed-form integrals match hand values") {
    // f(t) = t on [0, 1]
    const auto linear = PiecewisePolyExp::exp_poly({0.0, 1.0}, 0.0, 0.0);
    CHECK(linear.integrate(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    // f(t) = e^t on [0, 1] -> e - 1
    const auto expo = PiecewisePolyExp::exp_poly({1.0}, 1.0, 0.0);
    CHECK(expo.integrate(0.0, 1.0) ==
          doctest::Approx(1.7182818284590452).epsilon(1e-14));

    // f(t) = t e^{2t} on [0, 1] -> (e^2 + 1)/4
    const auto texp = PiecewisePolyExp::exp_poly({0.0, 1.0}, 2.0, 0.0);
    CHECK(texp.integrate(0.0, 1.0) ==
          doctest::Approx(2.0972640247326626).epsilon(1e-14));

    // empty and reversed ranges are exactly zero
    CHECK(texp.integrate(1.0, 1.0) == 0.0);
    CHECK(texp.integrate(2.0, 1.0) == 0.0);
}

TEST_CASE("integration matches adaptive quadrature on random piecewise data") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const double a = rng.uniform(-1.0, 0.0);
        const double b = a + rng.uniform(0.5, 2.0);
        const double rate = rng.uniform(-2.5, 2.5);
        std::vector<double> coeffs(1 + rng.index(5));
        for (double& c : coeffs) c = rng.uniform(-2.0, 2.0);
        const auto f = PiecewisePolyExp::exp_poly_on(Interval{a, b}, coeffs, rate, a);
        const double exact = f.integrate(a - 0.5, b + 0.5);
        const double quad = adaptive_quadrature([&](double t) { return f.eval(t); }, a - 0.5,
                                                b + 0.5, 1e-13);
        CHECK(exact == doctest::Approx(quad).epsilon(1e-12));
    }
}

TEST_CASE("arithmetic closure: products, sums, derivatives") {
    Rng rng(23);
    const auto bump = PiecewisePolyExp::bump(Interval{0.0, 1.0}, 2);
    const auto expo = PiecewisePolyExp::exp_poly({1.0, 0.5}, -0.7, 0.25);
    const auto product = bump * expo;
    const auto sum = bump + expo.restricted(Interval{-1.0, 2.0});
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(-1.5, 2.5);
        CHECK(product.eval(t) == doctest::Approx(bump.eval(t) * expo.eval(t)).epsilon(1e-12));
        const double expected =
            bump.eval(t) + (t >= -1.0 && t < 2.0 ? expo.eval(t) : 0.0);
        CHECK(sum.eval(t) == doctest::Approx(expected).epsilon(1e-12));
    }
    // derivative of the bump at interior points vs finite differences
    const auto dbump = bump.derivative();
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(0.05, 0.95);
        const double h = 1e-6;
        const double fd = (bump.eval(t + h) - bump.eval(t - h)) / (2.0 * h);
        CHECK(dbump.eval(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("bump vanishes to its order at the support ends") {
    const auto bump = PiecewisePolyExp::bump(Interval{0.25, 0.75}, 3);
    CHECK(bump.eval(0.25) == 0.0);
    CHECK(bump.eval(0.75) == 0.0);
    CHECK(bump.eval(0.2) == 0.0);
    CHECK(bump.eval(0.8) == 0.0);
    CHECK(bump.eval(0.5) > 0.0);
    const auto d2 = bump.derivative().derivative();
    CHECK(d2.eval(0.25) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("left limits at breakpoints") {
    // Heaviside-like piece on [0.5, inf)
    const auto step = PiecewisePolyExp::exp_poly_on(
        Interval{0.5, std::numeric_limits<double>::infinity()}, {1.0}, 0.0, 0.5);
    CHECK(step.eval(0.5) == 1.0);
    CHECK(step.eval_left(0.5) == 0.0);
    CHECK(step.eval_left(0.7) == 1.0);
}

TEST_CASE("inner product of disjoint supports is exactly zero") {
    const auto f = PiecewisePolyExp::bump(Interval{0.0, 1.0}, 2);
    const auto g = PiecewisePolyExp::bump(Interval{1.5, 2.0}, 2);
    CHECK(inner_product(f, g) == 0.0);
}
