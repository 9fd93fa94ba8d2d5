#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "tps/piecewise.hpp"
#include "tps/spline.hpp"

namespace tps {

/// One axis factor of a multidimensional atom: either the anchored monomial
/// t^degree/degree! or the causal Green factor (t - knot)_+^{N-1}/(N-1)!.
struct MultiFactor {
    bool is_green = false;
    int degree = 0;   // poly factor degree, 0..N-1
    double knot = 0.0;  // green factor knot in [0, 1]
};

struct MultiAtom {
    double weight = 0.0;
    std::vector<MultiFactor> factors;  // length D
};

/// D-dimensional spline on [0,1]^D for the operator D^N (x) ... (x) D^N.
/// Pure polynomial content lives in null_component (row-major over per-axis
/// degrees, axis 0 slowest).
struct MultiSpline {
    int dimension = 1;
    int order = 1;
    std::vector<MultiAtom> atoms;
    std::vector<double> null_component;  // size N^D

    int sparsity_count() const;
};

double multi_eval(const MultiSpline& s, const std::vector<double>& t);

/// Sum over non-pure-null atoms of |weight|; each atom belongs to exactly one
/// face term (Green axes marked with N).
double multi_seminorm(const MultiSpline& s);

/// Face assignment for the partition invariant: multi-index with n_d = N on
/// Green axes and n_d = degree on poly axes, mapped to the summed |weight|.
std::map<std::vector<int>, double> multi_face_masses(const MultiSpline& s);

/// Green knots at 0 fold into polynomial factors, knots at 1 drop, duplicate
/// signatures merge, pure-polynomial atoms move into null_component.
MultiSpline multi_canonicalize(const MultiSpline& s);

/// Separable measurement over [0,1]^D: per-axis profiles or a Dirac point
/// (Diracs require order >= 2).
struct MultiFunctional {
    bool is_dirac = false;
    std::vector<double> point;
    std::vector<PiecewisePolyExp> profiles;

    static MultiFunctional dirac(std::vector<double> point);
    static MultiFunctional box(const std::vector<Interval>& rects);
};

struct MultiProblem {
    Eigen::VectorXd y;
    std::vector<MultiFunctional> functionals;
    double lambda = 0.0;
    int dimension = 2;
    int order = 1;
    double tol = 1e-8;
    long max_iterations = 200000;
};

struct MultiGrid {
    std::vector<double> axis_knots;  // shared 1D candidate set per axis
    double spacing = 0.0;
    int refinement_levels = 2;
};

MultiGrid default_multi_grid(int n1d = 17, int levels = 2);

struct MultiCertification {
    int sparsity_count = 0;
    int bound = 0;
    bool sparsity_ok = false;
    bool localization_ok = false;
    bool interior_ok = false;  // informational for D > 2
    bool gap_ok = false;
    bool pass() const { return sparsity_ok && localization_ok && gap_ok; }
};

struct MultiSolveResult {
    MultiSpline spline;
    double objective = 0.0;
    double duality_gap = 0.0;
    long iterations = 0;
    MultiCertification certification;
};

/// Same dictionary machinery as the 2D solver with one atom family per face
/// class; count bound M - N^D.
MultiSolveResult multi_solve(const MultiProblem& problem, MultiGrid grid);

/// Smallest lambda with an all-zero penalized block on this grid.
double multi_lambda_max(const MultiProblem& problem, const MultiGrid& grid);

/// Exact conversion of a D = 2 multidimensional spline to the 2D module's
/// representation on [0,1]^2 (alpha = 0).
TensorSpline to_tensor_spline(const MultiSpline& s);

}  // namespace tps
