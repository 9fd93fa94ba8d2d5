#include "tps/multidim.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tps/errors.hpp"
#include "tps/lasso.hpp"
#include "tps/odo.hpp"

namespace tps {

namespace {

constexpr double kKnotTol = 1e-12;

double factor_eval(const MultiFactor& f, int order, double t) {
    if (f.is_green) return green_eval(Odo{0.0, order}, t - f.knot);
    return exp_monomial(0.0, f.degree, t);
}

PiecewisePolyExp factor_ppe(const MultiFactor& f, int order) {
    if (f.is_green) return green_ppe(Odo{0.0, order}, f.knot);
    return nullspace_ppe(Odo{0.0, order}, f.degree + 1, 0.0);
}

long null_index(const std::vector<int>& degrees, int order) {
    long idx = 0;
    for (int deg : degrees) idx = idx * order + deg;
    return idx;
}

}  // namespace

int MultiSpline::sparsity_count() const {
    int count = 0;
    for (const auto& a : atoms) {
        bool has_green = false;
        for (const auto& f : a.factors) has_green = has_green || f.is_green;
        if (has_green && a.weight != 0.0) ++count;
    }
    return count;
}

double multi_eval(const MultiSpline& s, const std::vector<double>& t) {
    if (int(t.size()) != s.dimension)
        throw std::invalid_argument("multi_eval: point dimension mismatch");
    double acc = 0.0;
    for (const auto& a : s.atoms) {
        double prod = a.weight;
        for (int d = 0; d < s.dimension && prod != 0.0; ++d)
            prod *= factor_eval(a.factors[std::size_t(d)], s.order, t[std::size_t(d)]);
        acc += prod;
    }
    if (!s.null_component.empty()) {
        std::vector<int> degrees(std::size_t(s.dimension), 0);
        for (std::size_t idx = 0; idx < s.null_component.size(); ++idx) {
            const double w = s.null_component[idx];
            if (w != 0.0) {
                double prod = w;
                long rest = long(idx);
                for (int d = s.dimension - 1; d >= 0; --d) {
                    degrees[std::size_t(d)] = int(rest % s.order);
                    rest /= s.order;
                }
                for (int d = 0; d < s.dimension; ++d)
                    prod *= exp_monomial(0.0, degrees[std::size_t(d)], t[std::size_t(d)]);
                acc += prod;
            }
        }
    }
    return acc;
}

double multi_seminorm(const MultiSpline& s) {
    double total = 0.0;
    for (const auto& a : s.atoms) {
        bool has_green = false;
        for (const auto& f : a.factors) has_green = has_green || f.is_green;
        if (has_green) total += std::abs(a.weight);
    }
    return total;
}

std::map<std::vector<int>, double> multi_face_masses(const MultiSpline& s) {
    std::map<std::vector<int>, double> faces;
    for (const auto& a : s.atoms) {
        std::vector<int> key(std::size_t(s.dimension), 0);
        bool has_green = false;
        for (int d = 0; d < s.dimension; ++d) {
            const auto& f = a.factors[std::size_t(d)];
            key[std::size_t(d)] = f.is_green ? s.order : f.degree;
            has_green = has_green || f.is_green;
        }
        if (has_green) faces[key] += std::abs(a.weight);
    }
    return faces;
}

MultiSpline multi_canonicalize(const MultiSpline& s) {
    MultiSpline out;
    out.dimension = s.dimension;
    out.order = s.order;
    out.null_component = s.null_component;
    out.null_component.resize(std::size_t(std::pow(double(s.order), double(s.dimension))), 0.0);

    std::vector<MultiAtom> rewritten;
    for (MultiAtom a : s.atoms) {
        if (a.weight == 0.0) continue;
        bool drop = false;
        bool pure_null = true;
        for (auto& f : a.factors) {
            if (!f.is_green) continue;
            if (std::abs(f.knot - 1.0) <= kKnotTol) {
                drop = true;  // vanishes on the open cube
                break;
            }
            if (std::abs(f.knot) <= kKnotTol) {
                // (t - 0)_+^{N-1}/(N-1)! equals t^{N-1}/(N-1)! on t >= 0
                f = MultiFactor{false, s.order - 1, 0.0};
            } else {
                pure_null = false;
            }
        }
        if (drop) continue;
        for (const auto& f : a.factors) pure_null = pure_null && !f.is_green;
        if (pure_null) {
            std::vector<int> degrees;
            degrees.reserve(a.factors.size());
            for (const auto& f : a.factors) degrees.push_back(f.degree);
            out.null_component[std::size_t(null_index(degrees, s.order))] += a.weight;
        } else {
            rewritten.push_back(std::move(a));
        }
    }

    // merge identical signatures
    for (const auto& a : rewritten) {
        bool merged = false;
        for (auto& b : out.atoms) {
            bool same = true;
            for (int d = 0; d < s.dimension && same; ++d) {
                const auto& fa = a.factors[std::size_t(d)];
                const auto& fb = b.factors[std::size_t(d)];
                same = (fa.is_green == fb.is_green) &&
                       (fa.is_green ? std::abs(fa.knot - fb.knot) <= kKnotTol
                                    : fa.degree == fb.degree);
            }
            if (same) {
                b.weight += a.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.atoms.push_back(a);
    }
    out.atoms.erase(std::remove_if(out.atoms.begin(), out.atoms.end(),
                                   [](const MultiAtom& a) { return a.weight == 0.0; }),
                    out.atoms.end());
    return out;
}

MultiFunctional MultiFunctional::dirac(std::vector<double> point) {
    MultiFunctional fn;
    fn.is_dirac = true;
    fn.point = std::move(point);
    return fn;
}

MultiFunctional MultiFunctional::box(const std::vector<Interval>& rects) {
    MultiFunctional fn;
    fn.is_dirac = false;
    fn.profiles.reserve(rects.size());
    for (const auto& k : rects) {
        validate_interval(k, "multidim box");
        fn.profiles.push_back(PiecewisePolyExp::constant(1.0).restricted(k));
    }
    return fn;
}

MultiGrid default_multi_grid(int n1d, int levels) {
    MultiGrid grid;
    grid.axis_knots.resize(std::size_t(n1d));
    for (int i = 0; i < n1d; ++i)
        grid.axis_knots[std::size_t(i)] = double(i) / double(n1d - 1);
    grid.spacing = 1.0 / double(n1d - 1);
    grid.refinement_levels = levels;
    return grid;
}

namespace {

double functional_axis_value(const MultiFunctional& fn, int axis, const MultiFactor& factor,
                             int order) {
    if (fn.is_dirac) return factor_eval(factor, order, fn.point[std::size_t(axis)]);
    return inner_product(factor_ppe(factor, order), fn.profiles[std::size_t(axis)]);
}

struct MultiDictionary {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    std::vector<MultiAtom> atom_of_column;
};

/// Enumerates factor-type assignments in lexicographic digit order (digit
/// 0..N-1 = poly degree, digit N = green) and green-knot tuples odometer-wise.
MultiDictionary assemble_multi(const MultiProblem& problem, const MultiGrid& grid) {
    const int dim = problem.dimension;
    const int n = problem.order;
    const int m = int(problem.functionals.size());
    const long g = long(grid.axis_knots.size());

    MultiDictionary dict;
    std::vector<Eigen::VectorXd> cols;
    std::vector<MultiAtom> atoms;

    std::vector<int> digits(std::size_t(dim), 0);
    for (;;) {
        bool any_green = false;
        for (int d = 0; d < dim; ++d) any_green = any_green || (digits[std::size_t(d)] == n);
        if (any_green) {
            std::vector<int> green_axes;
            for (int d = 0; d < dim; ++d)
                if (digits[std::size_t(d)] == n) green_axes.push_back(d);
            std::vector<long> odometer(green_axes.size(), 0);
            for (;;) {
                MultiAtom atom;
                atom.weight = 1.0;
                atom.factors.assign(std::size_t(dim), MultiFactor{});
                for (int d = 0; d < dim; ++d) {
                    if (digits[std::size_t(d)] < n)
                        atom.factors[std::size_t(d)] = MultiFactor{false, digits[std::size_t(d)], 0.0};
                }
                for (std::size_t k = 0; k < green_axes.size(); ++k)
                    atom.factors[std::size_t(green_axes[k])] =
                        MultiFactor{true, 0, grid.axis_knots[std::size_t(odometer[k])]};
                Eigen::VectorXd col(m);
                for (int i = 0; i < m; ++i) {
                    double prod = 1.0;
                    for (int d = 0; d < dim && prod != 0.0; ++d)
                        prod *= functional_axis_value(problem.functionals[std::size_t(i)], d,
                                                      atom.factors[std::size_t(d)], n);
                    col(i) = prod;
                }
                cols.push_back(std::move(col));
                atoms.push_back(std::move(atom));
                // advance odometer
                std::size_t k = 0;
                for (; k < odometer.size(); ++k) {
                    if (++odometer[k] < g) break;
                    odometer[k] = 0;
                }
                if (k == odometer.size()) break;
            }
        }
        // advance digits in base (n + 1)
        int d = dim - 1;
        for (; d >= 0; --d) {
            if (++digits[std::size_t(d)] <= n) break;
            digits[std::size_t(d)] = 0;
        }
        if (d < 0) break;
    }

    dict.a.resize(m, long(cols.size()));
    for (long c = 0; c < long(cols.size()); ++c) dict.a.col(c) = cols[std::size_t(c)];
    dict.atom_of_column = std::move(atoms);

    // pure polynomial block, degrees row-major (axis 0 slowest)
    const long q = long(std::llround(std::pow(double(n), double(dim))));
    dict.b.resize(m, q);
    std::vector<int> degrees(std::size_t(dim), 0);
    for (long idx = 0; idx < q; ++idx) {
        long rest = idx;
        for (int d = dim - 1; d >= 0; --d) {
            degrees[std::size_t(d)] = int(rest % n);
            rest /= n;
        }
        Eigen::VectorXd col(m);
        for (int i = 0; i < m; ++i) {
            double prod = 1.0;
            for (int d = 0; d < dim && prod != 0.0; ++d)
                prod *= functional_axis_value(problem.functionals[std::size_t(i)], d,
                                              MultiFactor{false, degrees[std::size_t(d)], 0.0}, n);
            col(i) = prod;
        }
        dict.b.col(idx) = col;
    }
    return dict;
}

}  // namespace

double multi_lambda_max(const MultiProblem& problem, const MultiGrid& grid) {
    const MultiDictionary dict = assemble_multi(problem, grid);
    return lambda_max(dict.a, dict.b, problem.y);
}

MultiSolveResult multi_solve(const MultiProblem& problem, MultiGrid grid) {
    const int dim = problem.dimension;
    const int n = problem.order;
    if (dim < 1 || dim > 4)
        throw std::invalid_argument("multi_solve: dimension must be in 1..4");
    if (!(problem.lambda > 0.0)) throw std::invalid_argument("multi_solve: lambda must be positive");
    const long q = long(std::llround(std::pow(double(n), double(dim))));
    if (problem.y.size() != long(problem.functionals.size()))
        throw std::invalid_argument("multi_solve: y length mismatch");
    if (problem.y.size() < q)
        throw AssumptionError("multi_solve: need at least N^D measurements");
    if (n < 2)
        for (const auto& fn : problem.functionals)
            if (fn.is_dirac)
                throw AssumptionError("multi_solve: DiracNeedsOrderTwo on every axis for N = 1");

    LassoOptions options;
    options.tol = problem.tol;
    options.max_iter = problem.max_iterations;

    MultiDictionary dict = assemble_multi(problem, grid);
    LassoSolution sol = solve_lasso_free_block(dict.a, dict.b, problem.y, problem.lambda, options);

    const int levels = grid.refinement_levels;
    for (int level = 0; level < levels; ++level) {
        // zoom the shared axis knot set around every active green knot
        std::vector<double> knots;
        for (long i = 0; i < sol.theta.size(); ++i) {
            if (sol.theta(i) == 0.0) continue;
            for (const auto& f : dict.atom_of_column[std::size_t(i)].factors)
                if (f.is_green) knots.push_back(f.knot);
        }
        if (knots.empty()) break;
        std::vector<double> pts;
        for (double u : knots)
            for (int i = -2; i <= 2; ++i) pts.push_back(u + 0.5 * grid.spacing * i);
        for (double& x : pts) x = std::min(std::max(x, 0.0), 1.0);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                  pts.end());
        grid.axis_knots = std::move(pts);
        grid.spacing *= 0.5;
        dict = assemble_multi(problem, grid);
        sol = solve_lasso_free_block(dict.a, dict.b, problem.y, problem.lambda, options);
    }

    const int bound = int(problem.y.size() - q);
    const Eigen::VectorXd reduced = reduce_support(dict.a, dict.b, sol.theta, bound);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dict.b);
    const Eigen::VectorXd d = qr.solve(problem.y - dict.a * reduced);

    MultiSolveResult result;
    result.spline.dimension = dim;
    result.spline.order = n;
    result.spline.null_component.assign(std::size_t(q), 0.0);
    for (long i = 0; i < q; ++i) result.spline.null_component[std::size_t(i)] = d(i);
    for (long i = 0; i < reduced.size(); ++i) {
        if (reduced(i) == 0.0) continue;
        MultiAtom a = dict.atom_of_column[std::size_t(i)];
        a.weight = reduced(i);
        result.spline.atoms.push_back(std::move(a));
    }
    result.spline = multi_canonicalize(result.spline);

    Eigen::VectorXd residual = problem.y - dict.a * reduced - dict.b * d;
    result.objective = 0.5 * residual.squaredNorm() + problem.lambda * reduced.cwiseAbs().sum();
    result.duality_gap = sol.gap;
    result.iterations = sol.iterations;

    auto& cert = result.certification;
    cert.bound = bound;
    cert.sparsity_count = result.spline.sparsity_count();
    cert.sparsity_ok = cert.sparsity_count <= bound;
    cert.gap_ok = sol.gap <= problem.tol;
    cert.localization_ok = true;
    cert.interior_ok = true;
    for (const auto& a : result.spline.atoms)
        for (const auto& f : a.factors)
            if (f.is_green) {
                cert.localization_ok = cert.localization_ok && f.knot >= 0.0 && f.knot <= 1.0;
                cert.interior_ok = cert.interior_ok && f.knot > 0.0 && f.knot < 1.0;
            }
    return result;
}

TensorSpline to_tensor_spline(const MultiSpline& s) {
    if (s.dimension != 2)
        throw std::invalid_argument("to_tensor_spline: conversion requires D = 2");
    const Odo odo{0.0, s.order};
    const Rect domain{Interval{0.0, 1.0}, Interval{0.0, 1.0}};
    std::vector<TensorAtom> atoms;
    for (const auto& a : s.atoms) {
        const MultiFactor& f1 = a.factors[0];
        const MultiFactor& f2 = a.factors[1];
        if (f1.is_green && f2.is_green)
            atoms.push_back(TensorAtom{AtomFamily::TensorGreen, 0, 0, a.weight, f1.knot, f2.knot});
        else if (!f1.is_green && f2.is_green)
            atoms.push_back(TensorAtom{AtomFamily::PolyGreen, f1.degree + 1, 0, a.weight, 0.0,
                                       f2.knot});
        else if (f1.is_green && !f2.is_green)
            atoms.push_back(TensorAtom{AtomFamily::GreenPoly, 0, f2.degree + 1, a.weight, f1.knot,
                                       0.0});
        else
            atoms.push_back(
                TensorAtom{AtomFamily::PolyPoly, f1.degree + 1, f2.degree + 1, a.weight, 0, 0});
    }
    for (std::size_t idx = 0; idx < s.null_component.size(); ++idx) {
        const double w = s.null_component[idx];
        if (w == 0.0) continue;
        const int deg2 = int(idx) % s.order;
        const int deg1 = int(idx) / s.order;
        atoms.push_back(TensorAtom{AtomFamily::PolyPoly, deg1 + 1, deg2 + 1, w, 0.0, 0.0});
    }
    return TensorSpline(odo, odo, domain, std::move(atoms));
}

}  // namespace tps
