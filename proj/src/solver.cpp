#include "tps/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tps/errors.hpp"

namespace tps {

namespace {

std::vector<double> linspace(const Interval& k, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = k.lo + (k.hi - k.lo) * double(i) / double(n - 1);
    return v;
}

std::vector<double> dedupe_sorted(std::vector<double> v, const Interval& k) {
    for (double& x : v) x = std::min(std::max(x, k.lo), k.hi);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            v.end());
    return v;
}

double soft_objective(const Problem& problem, const Dictionary& dict,
                      const Eigen::VectorXd& theta, const Eigen::VectorXd& d) {
    Eigen::VectorXd r = problem.y - dict.a * theta;
    if (d.size() > 0) r -= dict.b * d;
    return 0.5 * r.squaredNorm() + problem.lambda * theta.cwiseAbs().sum();
}

}  // namespace

GridSpec default_grid(const Rect& domain, int n2d, int n1d, int levels) {
    GridSpec grid;
    const auto g1 = linspace(domain.k1, n2d);
    const auto g2 = linspace(domain.k2, n2d);
    grid.grid2d.reserve(std::size_t(n2d) * std::size_t(n2d));
    for (double x1 : g1)
        for (double x2 : g2) grid.grid2d.emplace_back(x1, x2);
    grid.grid1d_axis2 = linspace(domain.k2, n1d);
    grid.grid1d_axis1 = linspace(domain.k1, n1d);
    grid.refinement_levels = levels;
    grid.spacing2d_1 = domain.k1.length() / double(n2d - 1);
    grid.spacing2d_2 = domain.k2.length() / double(n2d - 1);
    grid.spacing1d_axis2 = domain.k2.length() / double(n1d - 1);
    grid.spacing1d_axis1 = domain.k1.length() / double(n1d - 1);
    return grid;
}

void Problem::validate() const {
    validate_odo(odo1);
    validate_odo(odo2);
    validate_interval(domain.k1, "problem domain K1");
    validate_interval(domain.k2, "problem domain K2");
    if (!(lambda > 0.0)) throw std::invalid_argument("problem: lambda must be positive");
    if (y.size() != fwd.size())
        throw std::invalid_argument("problem: y length does not match functional count");
    const AssumptionReport report = check_assumptions(fwd, odo1, odo2);
    if (!report.pass()) throw AssumptionError("problem assumptions fail:\n" + report.summary());
}

Dictionary assemble_dictionary(const Problem& problem, const GridSpec& grid) {
    const int m = problem.fwd.size();
    const int n1 = problem.odo1.order;
    const int n2 = problem.odo2.order;
    const TensorSpline context = problem.empty_spline();

    Dictionary dict;
    const long p = long(grid.grid2d.size()) + long(n1) * long(grid.grid1d_axis2.size()) +
                   long(n2) * long(grid.grid1d_axis1.size());
    dict.a.resize(m, p);
    dict.atom_of_column.reserve(std::size_t(p));
    long col = 0;
    for (const auto& [x1, x2] : grid.grid2d) {
        const TensorAtom atom{AtomFamily::TensorGreen, 0, 0, 1.0, x1, x2};
        dict.a.col(col++) = measure_atom_column(atom, problem.fwd, context);
        dict.atom_of_column.push_back(atom);
    }
    for (int n = 1; n <= n1; ++n)
        for (double y2 : grid.grid1d_axis2) {
            const TensorAtom atom{AtomFamily::PolyGreen, n, 0, 1.0, 0.0, y2};
            dict.a.col(col++) = measure_atom_column(atom, problem.fwd, context);
            dict.atom_of_column.push_back(atom);
        }
    for (int n = 1; n <= n2; ++n)
        for (double z1 : grid.grid1d_axis1) {
            const TensorAtom atom{AtomFamily::GreenPoly, 0, n, 1.0, z1, 0.0};
            dict.a.col(col++) = measure_atom_column(atom, problem.fwd, context);
            dict.atom_of_column.push_back(atom);
        }

    dict.b.resize(m, n1 * n2);
    col = 0;
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j)
            dict.b.col(col++) = measure_atom_column(TensorAtom{AtomFamily::PolyPoly, i, j, 1.0,
                                                               0.0, 0.0},
                                                    problem.fwd, context);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dict.b);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-10 * sv(0))
        throw RankDeficientNullBlockError("dictionary null block is rank deficient");
    return dict;
}

namespace {

std::vector<TensorAtom> atoms_from_solution(const Dictionary& dict, const Eigen::VectorXd& theta,
                                            const Eigen::VectorXd& d, int n1, int n2) {
    std::vector<TensorAtom> atoms;
    for (long i = 0; i < theta.size(); ++i) {
        if (theta(i) == 0.0) continue;
        TensorAtom a = dict.atom_of_column[std::size_t(i)];
        a.weight = theta(i);
        atoms.push_back(a);
    }
    long col = 0;
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j) {
            const double w = (d.size() > col) ? d(col) : 0.0;
            ++col;
            if (w != 0.0) atoms.push_back(TensorAtom{AtomFamily::PolyPoly, i, j, w, 0.0, 0.0});
        }
    return atoms;
}

}  // namespace

SolveResult solve_grid(const Problem& problem, const GridSpec& grid, double tol) {
    auto dict = std::make_shared<Dictionary>(assemble_dictionary(problem, grid));
    LassoOptions options;
    options.tol = tol;
    options.max_iter = problem.max_iterations;
    const LassoSolution lasso =
        solve_lasso_free_block(dict->a, dict->b, problem.y, problem.lambda, options);

    SolveResult result{problem.empty_spline()};
    result.theta = lasso.theta;
    result.d = lasso.d;
    result.dict = dict;
    result.objective = lasso.objective;
    result.duality_gap = lasso.gap;
    result.iterations = lasso.iterations;
    result.spline = result.spline.with_atoms(
        atoms_from_solution(*dict, lasso.theta, lasso.d, problem.odo1.order, problem.odo2.order));
    return result;
}

double brute_force_oracle(const Problem& problem, const GridSpec& grid, int max_support) {
    const Dictionary dict = assemble_dictionary(problem, grid);
    const long p = dict.a.cols();
    const long m = dict.a.rows();
    const long q = dict.b.cols();
    if (p > 50 || max_support > 6)
        throw TooLargeError("brute_force_oracle: limits are P <= 50, max_support <= 6");
    double combos = 0.0;
    {
        double c = 1.0;
        for (int s = 0; s <= max_support; ++s) {
            if (s > 0) c = c * double(p - s + 1) / double(s);
            combos += c * std::pow(2.0, s);
        }
        if (combos > 2e7) throw TooLargeError("brute_force_oracle: enumeration too large");
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<long> support;

    // stationary candidate for a fixed support and sign pattern
    auto evaluate = [&](const std::vector<int>& signs) {
        const long s = long(support.size());
        Eigen::MatrixXd c(m, s + q);
        for (long k = 0; k < s; ++k) c.col(k) = dict.a.col(support[std::size_t(k)]);
        c.rightCols(q) = dict.b;
        Eigen::VectorXd lin = Eigen::VectorXd::Zero(s + q);
        for (long k = 0; k < s; ++k) lin(k) = problem.lambda * double(signs[std::size_t(k)]);
        const Eigen::MatrixXd gram = c.transpose() * c;
        const Eigen::VectorXd rhs = c.transpose() * problem.y - lin;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
        const Eigen::VectorXd z = cod.solve(rhs);
        if ((gram * z - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) return;  // unbounded orthant
        const Eigen::VectorXd r = problem.y - c * z;
        double l1 = 0.0;
        for (long k = 0; k < s; ++k) l1 += std::abs(z(k));
        best = std::min(best, 0.5 * r.squaredNorm() + problem.lambda * l1);
    };

    auto enumerate_signs = [&]() {
        const long s = long(support.size());
        std::vector<int> signs(std::size_t(s), 1);
        for (long mask = 0; mask < (1L << s); ++mask) {
            for (long k = 0; k < s; ++k) signs[std::size_t(k)] = (mask >> k) & 1 ? -1 : 1;
            evaluate(signs);
        }
    };

    std::function<void(long, int)> recurse = [&](long start, int remaining) {
        enumerate_signs();
        if (remaining == 0) return;
        for (long i = start; i < p; ++i) {
            if (dict.a.col(i).norm() == 0.0) continue;
            support.push_back(i);
            recurse(i + 1, remaining - 1);
            support.pop_back();
        }
    };
    recurse(0, max_support);
    return best;
}

Certification certify(const SolveResult& result, const Problem& problem) {
    Certification cert;
    const int q = problem.odo1.order * problem.odo2.order;
    cert.bound = problem.fwd.size() - q;
    cert.sparsity_count = result.spline.sparsity_count();
    cert.sparsity_ok = cert.sparsity_count <= cert.bound;
    cert.gap_ok = result.duality_gap <= problem.tol;

    cert.localization_ok = true;
    cert.interior_ok = true;
    const Rect& dom = problem.domain;
    for (const auto& a : result.spline.atoms()) {
        bool local = true, interior = true;
        switch (a.family) {
            case AtomFamily::TensorGreen:
                local = dom.contains(a.x1, a.x2);
                interior = dom.k1.contains_open(a.x1) && dom.k2.contains_open(a.x2);
                break;
            case AtomFamily::PolyGreen:
                local = dom.k2.contains(a.x2);
                interior = dom.k2.contains_open(a.x2);
                break;
            case AtomFamily::GreenPoly:
                local = dom.k1.contains(a.x1);
                interior = dom.k1.contains_open(a.x1);
                break;
            case AtomFamily::PolyPoly:
                continue;
        }
        if (!local || !interior) {
            cert.offending.push_back(a);
            cert.localization_ok = cert.localization_ok && local;
            cert.interior_ok = cert.interior_ok && interior;
        }
    }
    return cert;
}

SolveResult reduce_to_extreme_point(const SolveResult& result, const Problem& problem) {
    if (!result.dict) throw std::invalid_argument("reduce_to_extreme_point: missing dictionary");
    const Dictionary& dict = *result.dict;
    const int q = problem.odo1.order * problem.odo2.order;
    const int bound = problem.fwd.size() - q;

    SolveResult reduced = result;
    reduced.theta = reduce_support(dict.a, dict.b, result.theta, bound);

    // refit the free block and rebuild the spline
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dict.b);
    reduced.d = qr.solve(problem.y - dict.a * reduced.theta);
    reduced.objective = soft_objective(problem, dict, reduced.theta, reduced.d);
    reduced.spline = canonicalize(reduced.spline.with_atoms(atoms_from_solution(
        dict, reduced.theta, reduced.d, problem.odo1.order, problem.odo2.order)));
    reduced.certification = certify(reduced, problem);
    return reduced;
}

GridSpec refine_grid(const Problem& problem, const SolveResult& result, const GridSpec& grid) {
    GridSpec next = grid;
    if (next.refinement_levels <= 0) return next;
    next.refinement_levels = grid.refinement_levels - 1;

    std::vector<std::pair<double, double>> active2d;
    std::vector<double> active_axis2, active_axis1;
    for (const auto& a : result.spline.atoms()) {
        if (a.weight == 0.0) continue;
        switch (a.family) {
            case AtomFamily::TensorGreen: active2d.emplace_back(a.x1, a.x2); break;
            case AtomFamily::PolyGreen: active_axis2.push_back(a.x2); break;
            case AtomFamily::GreenPoly: active_axis1.push_back(a.x1); break;
            case AtomFamily::PolyPoly: break;
        }
    }

    if (!active2d.empty()) {
        const double h1 = grid.spacing2d_1, h2 = grid.spacing2d_2;
        std::vector<std::pair<double, double>> pts;
        for (const auto& [x1, x2] : active2d)
            for (int i = -2; i <= 2; ++i)
                for (int j = -2; j <= 2; ++j)
                    pts.emplace_back(x1 + 0.5 * h1 * i, x2 + 0.5 * h2 * j);
        for (auto& [x1, x2] : pts) {
            x1 = std::min(std::max(x1, problem.domain.k1.lo), problem.domain.k1.hi);
            x2 = std::min(std::max(x2, problem.domain.k2.lo), problem.domain.k2.hi);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](const auto& a, const auto& b) {
                                  return std::abs(a.first - b.first) < 1e-14 &&
                                         std::abs(a.second - b.second) < 1e-14;
                              }),
                  pts.end());
        next.grid2d = std::move(pts);
        next.spacing2d_1 = 0.5 * h1;
        next.spacing2d_2 = 0.5 * h2;
    }
    if (!active_axis2.empty()) {
        std::vector<double> pts;
        for (double y2 : active_axis2)
            for (int i = -2; i <= 2; ++i) pts.push_back(y2 + 0.5 * grid.spacing1d_axis2 * i);
        next.grid1d_axis2 = dedupe_sorted(std::move(pts), problem.domain.k2);
        next.spacing1d_axis2 = 0.5 * grid.spacing1d_axis2;
    }
    if (!active_axis1.empty()) {
        std::vector<double> pts;
        for (double z1 : active_axis1)
            for (int i = -2; i <= 2; ++i) pts.push_back(z1 + 0.5 * grid.spacing1d_axis1 * i);
        next.grid1d_axis1 = dedupe_sorted(std::move(pts), problem.domain.k1);
        next.spacing1d_axis1 = 0.5 * grid.spacing1d_axis1;
    }
    return next;
}

SolveResult solve_full(const Problem& problem, GridSpec grid) {
    problem.validate();
    SolveResult result = solve_grid(problem, grid, problem.tol);
    const int levels = grid.refinement_levels;
    for (int level = 0; level < levels; ++level) {
        grid = refine_grid(problem, result, grid);
        result = solve_grid(problem, grid, problem.tol);
    }
    return reduce_to_extreme_point(result, problem);
}

}  // namespace tps
