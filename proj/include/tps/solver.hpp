#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "tps/lasso.hpp"
#include "tps/measurement.hpp"

namespace tps {

/// Candidate knot sets for the three penalized atom families.
struct GridSpec {
    std::vector<std::pair<double, double>> grid2d;  // TensorGreen knots
    std::vector<double> grid1d_axis2;               // PolyGreen knots (in K2)
    std::vector<double> grid1d_axis1;               // GreenPoly knots (in K1)
    int refinement_levels = 3;
    // current spacing per family, used by dyadic refinement
    double spacing2d_1 = 0.0, spacing2d_2 = 0.0;
    double spacing1d_axis2 = 0.0, spacing1d_axis1 = 0.0;
};

GridSpec default_grid(const Rect& domain, int n2d = 33, int n1d = 65, int levels = 3);

struct Problem {
    Eigen::VectorXd y;
    ForwardOperator fwd;
    double lambda = 0.0;
    Odo odo1, odo2;
    Rect domain;
    double tol = 1e-8;
    long max_iterations = 200000;

    /// Throws on violated invariants (lambda > 0, |y| = M, assumptions pass).
    void validate() const;
    TensorSpline empty_spline() const { return TensorSpline(odo1, odo2, domain, {}); }
};

struct Dictionary {
    Eigen::MatrixXd a;                   // M x P penalized columns
    Eigen::MatrixXd b;                   // M x (N1 N2) null block
    std::vector<TensorAtom> atom_of_column;
};

/// Column order: grid2d points, then (n, grid1d_axis2) for n = 1..N1, then
/// (n', grid1d_axis1) for n' = 1..N2. Throws RankDeficientNullBlockError when
/// the null block loses rank.
Dictionary assemble_dictionary(const Problem& problem, const GridSpec& grid);

struct Certification {
    int sparsity_count = 0;
    int bound = 0;
    bool sparsity_ok = false;
    bool localization_ok = false;
    bool interior_ok = false;
    bool gap_ok = false;
    std::vector<TensorAtom> offending;
    bool pass() const { return sparsity_ok && localization_ok && interior_ok && gap_ok; }
};

struct SolveResult {
    TensorSpline spline;
    double objective = 0.0;
    double duality_gap = 0.0;
    long iterations = 0;
    Certification certification;
    // solver-internal state carried for reduction/refinement
    Eigen::VectorXd theta;
    Eigen::VectorXd d;
    std::shared_ptr<const Dictionary> dict;
};

/// One grid solve (pre-reduction).
SolveResult solve_grid(const Problem& problem, const GridSpec& grid, double tol);

/// Exhaustive support/sign enumeration for tiny instances; returns the optimal
/// objective. Throws TooLargeError beyond P <= 50, max_support <= 6 or when
/// the enumeration would exceed ~2e7 stationary solves.
double brute_force_oracle(const Problem& problem, const GridSpec& grid, int max_support);

/// Carathéodory reduction to at most M - N1 N2 atoms, then canonicalization
/// and certification.
SolveResult reduce_to_extreme_point(const SolveResult& result, const Problem& problem);

/// Dyadic zoom: keeps each family's grid unchanged when it has no active
/// atoms, otherwise replaces it with half-spacing windows of +-1 old cell
/// around every active knot (old anchors included).
GridSpec refine_grid(const Problem& problem, const SolveResult& result, const GridSpec& grid);

Certification certify(const SolveResult& result, const Problem& problem);

/// Full pipeline: assumptions, solve, refinement loop, reduction,
/// canonicalization, certification.
SolveResult solve_full(const Problem& problem, GridSpec grid);

}  // namespace tps
