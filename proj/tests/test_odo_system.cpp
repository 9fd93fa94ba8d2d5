#include <doctest.h>

#include <cmath>

#include "tps/errors.hpp"
#include "tps/quadrature.hpp"
#include "tps/rng.hpp"
#include "tps/system.hpp"

using namespace tps;

TEST_CASE("green function closed form") {
    CHECK(green_eval(Odo{0.0, 1}, 0.5) == 1.0);   // Heaviside
    CHECK(green_eval(Odo{0.0, 1}, 0.0) == 1.0);   // 0^0 = 1 convention
    CHECK(green_eval(Odo{0.0, 2}, -1.0) == 0.0);  // causality
    CHECK(green_eval(Odo{1.0, 3}, 2.0) ==
          doctest::Approx(14.778112197861300).epsilon(1e-14));  // 2 e^2
    CHECK(green_eval(Odo{0.0, 2}, 0.0) == 0.0);  // continuous at 0 for N >= 2
}

TEST_CASE("null-space basis evaluation") {
    CHECK(nullspace_eval(Odo{0.0, 2}, 2, 0.0, 0.5) == 0.5);
    CHECK(nullspace_eval(Odo{0.0, 1}, 1, 0.0, 123.0) == 1.0);
    CHECK(nullspace_eval(Odo{2.0, 3}, 3, 1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(nullspace_eval(Odo{0.0, 2}, 3, 0.0, 0.5), std::out_of_range);
}

TEST_CASE("universal system: unit-mass bump is its own analysis function at N=1") {
    const Odo odo{0.0, 1};
    const auto bump = PiecewisePolyExp::bump(Interval{0.0, 1.0}, 2);
    const double mass = bump.integrate(0.0, 1.0);
    const auto sys = AdmissibleSystem::universal(odo, Interval{0.0, 1.0},
                                                 {bump.scaled(1.0 / mass)});
    // <1, phi_1> = 1, and phi equals the unit-mass generator
    CHECK(inner_product(sys.nullspace_basis(1), sys.phi()[0]) ==
          doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(0.0, 1.0);
        CHECK(sys.phi()[0].eval(t) ==
              doctest::Approx(bump.eval(t) / mass).epsilon(1e-12));
    }
}

TEST_CASE("universal system biorthogonality at N=2") {
    const Odo odo{0.0, 2};
    const auto sys = AdmissibleSystem::universal(odo, Interval{0.0, 1.0});
    CHECK(sys.biorthogonality_residual() <= 1e-10);
    const auto c = sys.project(sys.nullspace_basis(2));
    CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("proportional generators raise SingularGram") {
    const Odo odo{0.0, 2};
    const auto bump = PiecewisePolyExp::bump(Interval{0.0, 1.0}, 2);
    CHECK_THROWS_AS(
        AdmissibleSystem::universal(odo, Interval{0.0, 1.0}, {bump, bump.scaled(2.0)}),
        SingularGramError);
}

TEST_CASE("fundamental system functionals") {
    SUBCASE("N=1 left limit at K^-") {
        const auto sys = AdmissibleSystem::fundamental(Odo{0.0, 1}, Interval{0.0, 1.0});
        // f = g(. - 0): left limit at 0 vanishes
        CHECK(sys.project(green_ppe(Odo{0.0, 1}, 0.0))[0] == 0.0);
        CHECK(sys.project(PiecewisePolyExp::constant(1.0))[0] == 1.0);
    }
    SUBCASE("N=2 value and derivative") {
        const auto sys = AdmissibleSystem::fundamental(Odo{0.0, 2}, Interval{0.0, 1.0});
        const auto ramp = PiecewisePolyExp::exp_poly({0.0, 1.0}, 0.0, 0.0);  // f(t) = t
        const auto c = sys.project(ramp);
        CHECK(c[0] == 0.0);
        CHECK(c[1] == 1.0);
        // f = (. - 0.5)_+ : both functionals vanish left of the knot
        const auto atom = green_ppe(Odo{0.0, 2}, 0.5);
        const auto ca = sys.project(atom);
        CHECK(ca[0] == 0.0);
        CHECK(ca[1] == 0.0);
    }
    SUBCASE("biorthogonality is exact") {
        for (int order = 1; order <= 4; ++order) {
            const auto sys =
                AdmissibleSystem::fundamental(Odo{-0.3, order}, Interval{0.25, 2.0});
            CHECK(sys.biorthogonality_residual() <= 1e-12);
        }
    }
}

TEST_CASE("kernel values") {
    SUBCASE("fundamental kernel reduces to the Green's function") {
        const auto sys = AdmissibleSystem::fundamental(Odo{0.0, 1}, Interval{0.0, 1.0});
        CHECK(sys.kernel(0.8, 0.5) == 1.0);
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(0.0, 2.0);
            const double t = rng.uniform(-1.0, 3.0);
            CHECK(sys.kernel(t, x) == green_eval(Odo{0.0, 1}, t - x));
        }
    }
    SUBCASE("universal kernel support") {
        const auto sys = AdmissibleSystem::universal(Odo{0.0, 1}, Interval{0.0, 1.0});
        CHECK(sys.kernel(-0.5, -1.0) == 0.0);  // x < phi-, t > x
        // frozen from the closed form: w1(0.5) of the default N=1 bump is 1/2,
        // so g_phi(2, 0.5) = 1 - 1/2
        CHECK(sys.kernel(2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
        // and it agrees with a quadrature evaluation of both kernel terms
        const auto& phi = sys.phi()[0];
        const double w = adaptive_quadrature(
            [&](double v) { return green_eval(Odo{0.0, 1}, v - 0.5) * phi.eval(v); }, 0.0, 1.0,
            1e-12);
        CHECK(sys.kernel(2.0, 0.5) == doctest::Approx(1.0 - w).epsilon(1e-11));
    }
    SUBCASE("the two kernel forms agree across the analysis window") {
        // left-of-window form vs definition form, checked against quadrature
        Rng rng(7);
        for (const auto& [alpha, order] : {std::pair{0.0, 2}, {0.5, 3}}) {
            const Odo odo{alpha, order};
            const auto sys = AdmissibleSystem::universal(odo, Interval{0.0, 1.0});
            for (int i = 0; i < 10; ++i) {
                const double x = rng.uniform(-1.0, -0.01);  // left of the window
                const double t = rng.uniform(-1.5, 2.0);
                double reference = green_eval(odo, t - x);
                for (int n = 1; n <= order; ++n) {
                    const auto& phi = sys.phi()[std::size_t(n) - 1];
                    const double w = adaptive_quadrature(
                        [&](double v) { return green_eval(odo, v - x) * phi.eval(v); }, 0.0, 1.0,
                        1e-13);
                    reference -= w * sys.nullspace(n, t);
                }
                CHECK(sys.kernel(t, x) == doctest::Approx(reference).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("projection of kernel sections vanishes") {
    Rng rng(9);
    const auto sys = AdmissibleSystem::universal(Odo{0.4, 2}, Interval{0.0, 1.0});
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1.0, 2.0);
        for (double c : sys.project(sys.kernel_section(x))) CHECK(std::abs(c) <= 1e-9);
    }
    SUBCASE("projection is idempotent on null-space content") {
        const auto f = sys.nullspace_basis(1).scaled(0.7) + sys.nullspace_basis(2).scaled(-1.3);
        const auto c = sys.project(f);
        CHECK(c[0] == doctest::Approx(0.7).epsilon(1e-11));
        CHECK(c[1] == doctest::Approx(-1.3).epsilon(1e-11));
    }
    SUBCASE("projection of zero is zero") {
        for (double c : sys.project(PiecewisePolyExp{})) CHECK(c == 0.0);
    }
}
