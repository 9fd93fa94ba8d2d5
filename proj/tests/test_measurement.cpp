#include <doctest.h>

#include <cmath>

#include "tps/errors.hpp"
#include "tps/measurement.hpp"
#include "tps/quadrature.hpp"
#include "tps/rng.hpp"

using namespace tps;

namespace {
const Rect kUnit{Interval{0.0, 1.0}, Interval{0.0, 1.0}};
}

TEST_CASE("admissibility gate") {
    const auto dirac = MeasurementFunctional::dirac(0.5, 0.5);
    CHECK(!check_admissible(dirac, Odo{0.0, 2}, Odo{0.0, 2}));
    const auto v1 = check_admissible(dirac, Odo{0.0, 1}, Odo{0.0, 2});
    REQUIRE(v1.has_value());
    CHECK(v1->axis == 1);
    const auto v2 = check_admissible(dirac, Odo{0.0, 3}, Odo{0.0, 1});
    REQUIRE(v2.has_value());
    CHECK(v2->axis == 2);
    const auto box = MeasurementFunctional::box(kUnit);
    CHECK(!check_admissible(box, Odo{0.0, 1}, Odo{0.0, 1}));
    CHECK(!check_admissible(box, Odo{0.0, 2}, Odo{0.0, 1}));
}

TEST_CASE("box measurement of a Heaviside atom is the overlap area") {
    const Odo d1{0.0, 1};
    const TensorSpline s(d1, d1, kUnit,
                         {TensorAtom{AtomFamily::TensorGreen, 0, 0, 1.0, 0.25, 0.25}});
    CHECK(measure(s, MeasurementFunctional::box(kUnit)) ==
          doctest::Approx(0.5625).epsilon(1e-14));
}

TEST_CASE("dirac measurement equals evaluation") {
    const Odo d2{0.0, 2};
    const TensorSpline s(d2, d2, kUnit,
                         {TensorAtom{AtomFamily::TensorGreen, 0, 0, 1.0, 0.0, 0.0}});
    CHECK(measure(s, MeasurementFunctional::dirac(1.0, 1.0)) == 1.0);
    // and is rejected outright on first-order operators
    const Odo d1{0.0, 1};
    const TensorSpline flat(d1, d1, kUnit, {});
    CHECK_THROWS_AS(measure(flat, MeasurementFunctional::dirac(0.5, 0.5)), AssumptionError);
}

TEST_CASE("separable measurements match 2D quadrature") {
    Rng rng(71);
    for (int trial = 0; trial < 6; ++trial) {
        const Odo odo1{rng.uniform(-0.3, 0.3), 1 + int(rng.index(2))};
        const Odo odo2{rng.uniform(-0.3, 0.3), 1 + int(rng.index(2))};
        std::vector<TensorAtom> atoms{
            TensorAtom{AtomFamily::TensorGreen, 0, 0, rng.uniform(-1, 1), rng.uniform(0.1, 0.9),
                       rng.uniform(0.1, 0.9)},
            TensorAtom{AtomFamily::PolyGreen, 1, 0, rng.uniform(-1, 1), 0.0,
                       rng.uniform(0.1, 0.9)},
            TensorAtom{AtomFamily::PolyPoly, 1, 1, rng.uniform(-1, 1), 0.0, 0.0}};
        const TensorSpline s(odo1, odo2, kUnit, atoms);
        const Rect box{Interval{rng.uniform(0.0, 0.4), rng.uniform(0.6, 1.0)},
                       Interval{rng.uniform(0.0, 0.4), rng.uniform(0.6, 1.0)}};
        const auto fn = MeasurementFunctional::box(box);
        const double oracle = adaptive_quadrature_2d(
            [&](double t1, double t2) { return eval(s, t1, t2); }, box.k1.lo, box.k1.hi,
            box.k2.lo, box.k2.hi, 1e-11);
        CHECK(measure(s, fn) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("atom columns are per-functional measurements") {
    Rng rng(73);
    const Odo d1{0.0, 1};
    ForwardOperator fwd;
    fwd.domain = kUnit;
    for (int i = 0; i < 4; ++i) {
        const double x0 = rng.uniform(0.0, 0.5);
        const double y0 = rng.uniform(0.0, 0.5);
        fwd.functionals.push_back(MeasurementFunctional::box(
            Rect{Interval{x0, x0 + 0.4}, Interval{y0, y0 + 0.4}}));
    }
    const TensorSpline context(d1, d1, kUnit, {});
    SUBCASE("zero-weight atom gives the zero column") {
        const auto col = measure_atom_column(
            TensorAtom{AtomFamily::TensorGreen, 0, 0, 0.0, 0.5, 0.5}, fwd, context);
        CHECK(col.norm() == 0.0);
    }
    SUBCASE("constant atom measures box areas") {
        const auto col = measure_atom_column(TensorAtom{AtomFamily::PolyPoly, 1, 1, 1.0, 0, 0},
                                             fwd, context);
        for (int i = 0; i < 4; ++i) CHECK(col(i) == doctest::Approx(0.16).epsilon(1e-12));
    }
    SUBCASE("column entries equal per-atom measure calls") {
        const TensorAtom atom{AtomFamily::TensorGreen, 0, 0, 0.8, 0.3, 0.4};
        const auto col = measure_atom_column(atom, fwd, context);
        const TensorSpline single(d1, d1, kUnit, {atom});
        for (int i = 0; i < 4; ++i)
            CHECK(col(i) == measure(single, fwd.functionals[std::size_t(i)]));
    }
}

TEST_CASE("assumption report") {
    const Odo d2{0.0, 2};
    SUBCASE("too few measurements for the null dimension") {
        ForwardOperator fwd;
        fwd.domain = kUnit;
        for (int i = 0; i < 3; ++i)
            fwd.functionals.push_back(
                MeasurementFunctional::dirac(0.2 + 0.3 * i, 0.8 - 0.2 * i));
        const auto report = check_assumptions(fwd, d2, d2);
        CHECK(!report.count_ok);
        CHECK(!report.injective);
        CHECK(!report.pass());
    }
    SUBCASE("generic Dirac placements are injective") {
        ForwardOperator fwd;
        fwd.domain = kUnit;
        fwd.functionals.push_back(MeasurementFunctional::dirac(0.21, 0.33));
        fwd.functionals.push_back(MeasurementFunctional::dirac(0.71, 0.18));
        fwd.functionals.push_back(MeasurementFunctional::dirac(0.42, 0.77));
        fwd.functionals.push_back(MeasurementFunctional::dirac(0.88, 0.61));
        const auto report = check_assumptions(fwd, d2, d2);
        CHECK(report.count_ok);
        CHECK(report.injective);
        CHECK(report.null_rank == 4);
        CHECK(report.supports_inside);
        CHECK(report.pass());
    }
    SUBCASE("support outside the domain fails Assumption 5") {
        ForwardOperator fwd;
        fwd.domain = kUnit;
        fwd.functionals.push_back(MeasurementFunctional::box(
            Rect{Interval{-0.5, 0.5}, Interval{0.0, 1.0}}));
        const Odo d1{0.0, 1};
        const auto report = check_assumptions(fwd, d1, d1);
        CHECK(!report.supports_inside);
        CHECK(report.outside_functionals == std::vector<int>{0});
        CHECK(!report.pass());
    }
    SUBCASE("inadmissible Dirac is reported with its axis") {
        ForwardOperator fwd;
        fwd.domain = kUnit;
        fwd.functionals.push_back(MeasurementFunctional::dirac(0.5, 0.5));
        const Odo d1{0.0, 1};
        const auto report = check_assumptions(fwd, d1, d2);
        CHECK(!report.all_admissible);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].second.axis == 1);
        CHECK(!report.pass());
    }
}

TEST_CASE("measurement linearity") {
    Rng rng(79);
    const Odo odo{0.0, 2};
    const auto fn = MeasurementFunctional::box(
        Rect{Interval{0.1, 0.8}, Interval{0.2, 0.9}});
    std::vector<TensorAtom> a1{TensorAtom{AtomFamily::TensorGreen, 0, 0, 1.2, 0.3, 0.3}};
    std::vector<TensorAtom> a2{TensorAtom{AtomFamily::GreenPoly, 0, 2, -0.7, 0.6, 0.0}};
    const TensorSpline f(odo, odo, kUnit, a1);
    const TensorSpline g(odo, odo, kUnit, a2);
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    std::vector<TensorAtom> combo;
    for (auto a : a1) {
        a.weight *= alpha;
        combo.push_back(a);
    }
    for (auto a : a2) {
        a.weight *= beta;
        combo.push_back(a);
    }
    const TensorSpline h(odo, odo, kUnit, combo);
    CHECK(measure(h, fn) ==
          doctest::Approx(alpha * measure(f, fn) + beta * measure(g, fn)).epsilon(1e-12));
}
