#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "tps/errors.hpp"
#include "tps/rng.hpp"
#include "tps/solver.hpp"

using namespace tps;

namespace {

const Rect kUnit{Interval{0.0, 1.0}, Interval{0.0, 1.0}};

Problem small_problem(Rng& rng, int order, int m) {
    Problem p;
    p.odo1 = Odo{0.0, order};
    p.odo2 = Odo{0.0, order};
    p.domain = kUnit;
    p.fwd.domain = kUnit;
    for (int i = 0; i < m; ++i) {
        const double x0 = rng.uniform(0.0, 0.55);
        const double y0 = rng.uniform(0.0, 0.55);
        p.fwd.functionals.push_back(MeasurementFunctional::box(
            Rect{Interval{x0, x0 + rng.uniform(0.2, 0.44)},
                 Interval{y0, y0 + rng.uniform(0.2, 0.44)}}));
    }
    p.y.resize(m);
    for (int i = 0; i < m; ++i) p.y(i) = rng.uniform(-1.0, 1.0);
    p.lambda = 0.1;
    return p;
}

GridSpec tiny_grid() {
    GridSpec grid;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) grid.grid2d.emplace_back(0.15 + 0.3 * a, 0.2 + 0.25 * b);
    grid.grid1d_axis2 = {0.2, 0.5, 0.8};
    grid.grid1d_axis1 = {0.25, 0.55, 0.85};
    grid.refinement_levels = 0;
    grid.spacing2d_1 = grid.spacing2d_2 = 0.3;
    grid.spacing1d_axis2 = grid.spacing1d_axis1 = 0.3;
    return grid;
}

}  // namespace

TEST_CASE("dictionary bookkeeping") {
    Rng rng(101);
    Problem p = small_problem(rng, 1, 1);
    GridSpec grid;
    grid.grid2d.emplace_back(0.4, 0.4);
    grid.grid1d_axis2 = {0.5};
    grid.grid1d_axis1 = {0.5};
    const auto dict = assemble_dictionary(p, grid);
    CHECK(dict.a.rows() == 1);
    CHECK(dict.a.cols() == 3);  // 1 + N1*1 + N2*1
    CHECK(dict.b.cols() == 1);
    CHECK(dict.atom_of_column.size() == 3);
    SUBCASE("columns equal per-atom measurements") {
        const TensorSpline context = p.empty_spline();
        for (std::size_t c = 0; c < dict.atom_of_column.size(); ++c) {
            const auto col = measure_atom_column(dict.atom_of_column[c], p.fwd, context);
            CHECK((dict.a.col(long(c)) - col).norm() == 0.0);
        }
    }
}

TEST_CASE("lambda above lambda_max kills every penalized atom") {
    Rng rng(103);
    Problem p = small_problem(rng, 1, 4);
    const GridSpec grid = tiny_grid();
    const auto dict = assemble_dictionary(p, grid);
    const double lmax = lambda_max(dict.a, dict.b, p.y);
    p.lambda = lmax * 1.0001;
    const auto result = solve_grid(p, grid, 1e-9);
    CHECK(result.theta.cwiseAbs().maxCoeff() == 0.0);
    // d is the least-squares fit of y on the null block alone
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dict.b);
    const Eigen::VectorXd d_ls = qr.solve(p.y);
    CHECK((result.d - d_ls).norm() <= 1e-12);
    CHECK(result.duality_gap <= 1e-9);
}

TEST_CASE("scalar soft-threshold closed form") {
    // single functional, single candidate atom, no null block interference:
    // theta* = (g y - lambda)/g^2 when positive
    Problem p;
    p.odo1 = Odo{0.0, 1};
    p.odo2 = Odo{0.0, 1};
    p.domain = kUnit;
    p.fwd.domain = kUnit;
    p.fwd.functionals.push_back(MeasurementFunctional::box(kUnit));
    p.y.resize(1);
    p.y(0) = 1.0;
    p.lambda = 0.05;

    // bypass the full pipeline: solve on the penalized column only
    GridSpec grid;
    grid.grid2d.emplace_back(0.25, 0.25);
    grid.grid1d_axis2 = {};
    grid.grid1d_axis1 = {};
    const auto dict = assemble_dictionary(p, grid);
    const double g = dict.a(0, 0);
    CHECK(g == doctest::Approx(0.5625).epsilon(1e-14));
    const Eigen::MatrixXd empty_b(1, 0);
    const auto sol = solve_lasso_free_block(dict.a, empty_b, p.y, p.lambda, LassoOptions{});
    const double expected = (g * 1.0 - p.lambda) / (g * g);
    CHECK(sol.theta(0) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("objective matches the exhaustive oracle on tiny instances") {
    Rng rng(107);
    for (int trial = 0; trial < 5; ++trial) {
        Problem p = small_problem(rng, 1, 3);
        const GridSpec grid = tiny_grid();
        const auto result = solve_grid(p, grid, 1e-9);
        const double oracle = brute_force_oracle(p, grid, 4);
        CHECK(result.objective ==
              doctest::Approx(oracle).epsilon(1e-6).scale(std::max(1.0, oracle)));
    }
}

TEST_CASE("oracle guards its limits") {
    Rng rng(109);
    Problem p = small_problem(rng, 1, 3);
    CHECK_THROWS_AS(brute_force_oracle(p, tiny_grid(), 7), TooLargeError);
    CHECK_THROWS_AS(brute_force_oracle(p, default_grid(kUnit, 9, 9, 0), 4), TooLargeError);
}

TEST_CASE("reduction brings the support under the bound and keeps measurements") {
    Rng rng(113);
    Problem p = small_problem(rng, 1, 5);
    p.lambda = 1e-4;  // small penalty so many atoms activate
    const GridSpec grid = tiny_grid();
    const auto result = solve_grid(p, grid, 1e-8);
    const auto reduced = reduce_to_extreme_point(result, p);
    const int bound = 5 - 1;
    CHECK(reduced.certification.sparsity_count <= bound);
    CHECK(std::abs(reduced.objective - result.objective) <= 1e-8);
    const Eigen::VectorXd before = result.dict->a * result.theta + result.dict->b * result.d;
    const Eigen::VectorXd after = result.dict->a * reduced.theta + result.dict->b * reduced.d;
    CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-8);
    SUBCASE("idempotence") {
        const auto again = reduce_to_extreme_point(reduced, p);
        CHECK(again.certification.sparsity_count == reduced.certification.sparsity_count);
        CHECK(std::abs(again.objective - reduced.objective) <= 1e-12);
    }
}

TEST_CASE("duplicate columns merge into one atom") {
    Rng rng(127);
    Problem p = small_problem(rng, 1, 4);
    GridSpec grid = tiny_grid();
    grid.grid2d.push_back(grid.grid2d[0]);  // duplicate candidate knot
    const auto result = solve_grid(p, grid, 1e-8);
    const auto reduced = reduce_to_extreme_point(result, p);
    // canonicalization merged any duplicate knots
    for (std::size_t i = 0; i < reduced.spline.atoms().size(); ++i)
        for (std::size_t j = i + 1; j < reduced.spline.atoms().size(); ++j) {
            const auto& a = reduced.spline.atoms()[i];
            const auto& b = reduced.spline.atoms()[j];
            const bool same = a.family == b.family && a.n1 == b.n1 && a.n2 == b.n2 &&
                              a.x1 == b.x1 && a.x2 == b.x2;
            CHECK(!same);
        }
}

TEST_CASE("grid refinement zooms around active knots and never increases the objective") {
    Rng rng(131);
    Problem p = small_problem(rng, 1, 5);
    GridSpec grid = default_grid(kUnit, 9, 9, 2);
    const auto r0 = solve_grid(p, grid, 1e-9);
    SUBCASE("no active atoms leaves the grid unchanged") {
        Problem quiet = p;
        const auto dict = assemble_dictionary(quiet, grid);
        quiet.lambda = lambda_max(dict.a, dict.b, quiet.y) * 1.5;
        const auto rq = solve_grid(quiet, grid, 1e-9);
        const auto refined = refine_grid(quiet, rq, grid);
        CHECK(refined.grid2d.size() == grid.grid2d.size());
        CHECK(refined.grid1d_axis1 == grid.grid1d_axis1);
        CHECK(refined.grid1d_axis2 == grid.grid1d_axis2);
    }
    SUBCASE("objective is monotone across refinements") {
        double prev = r0.objective;
        GridSpec g = grid;
        SolveResult r = r0;
        for (int level = 0; level < 2; ++level) {
            g = refine_grid(p, r, g);
            r = solve_grid(p, g, 1e-9);
            CHECK(r.objective <= prev + 2e-8);
            prev = r.objective;
        }
    }
}

TEST_CASE("scaling equivariance of the solution path") {
    Rng rng(137);
    Problem p = small_problem(rng, 1, 4);
    const GridSpec grid = tiny_grid();
    const auto base = solve_grid(p, grid, 1e-10);
    Problem scaled = p;
    const double s = 3.5;
    scaled.y *= s;
    scaled.lambda *= s;
    const auto big = solve_grid(scaled, grid, 1e-10);
    // support sets agree and coefficients scale by s
    for (long i = 0; i < base.theta.size(); ++i) {
        CHECK((base.theta(i) != 0.0) == (big.theta(i) != 0.0));
        if (base.theta(i) != 0.0)
            CHECK(big.theta(i) == doctest::Approx(s * base.theta(i)).epsilon(1e-6));
    }
}

TEST_CASE("certification flags out-of-domain knots") {
    Rng rng(139);
    Problem p = small_problem(rng, 1, 4);
    const GridSpec grid = tiny_grid();
    auto result = solve_grid(p, grid, 1e-8);
    result.spline = result.spline.with_atoms(
        {TensorAtom{AtomFamily::TensorGreen, 0, 0, 1.0, 1.5, 0.5}});
    const auto cert = certify(result, p);
    CHECK(!cert.localization_ok);
    REQUIRE(cert.offending.size() == 1);
    CHECK(cert.offending[0].x1 == 1.5);
}

TEST_CASE("problem validation") {
    Rng rng(149);
    Problem p = small_problem(rng, 1, 4);
    SUBCASE("lambda must be positive") {
        p.lambda = 0.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("assumption failure is typed") {
        Problem bad = p;
        bad.fwd.functionals.clear();
        bad.fwd.functionals.push_back(MeasurementFunctional::dirac(0.5, 0.5));
        bad.y.resize(1);
        CHECK_THROWS_AS(bad.validate(), AssumptionError);
    }
}

TEST_CASE("full pipeline on a well-posed instance") {
    Rng rng(151);
    Problem p = small_problem(rng, 1, 6);
    const auto dict = assemble_dictionary(p, default_grid(kUnit, 9, 17, 0));
    p.lambda = 0.15 * lambda_max(dict.a, dict.b, p.y);
    const auto result = solve_full(p, default_grid(kUnit, 17, 17, 2));
    CHECK(result.certification.sparsity_count <= 5);
    CHECK(result.certification.pass());
    CHECK(result.duality_gap <= p.tol);
}
