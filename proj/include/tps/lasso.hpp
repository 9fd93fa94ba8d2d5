#pragma once

#include <Eigen/Core>

namespace tps {

struct LassoOptions {
    double tol = 1e-8;       // duality-gap stopping criterion
    long max_iter = 200000;  // iteration cap before NoConvergenceError
};

struct LassoSolution {
    Eigen::VectorXd theta;  // penalized block
    Eigen::VectorXd d;      // free block
    double objective = 0.0;
    double gap = 0.0;
    long iterations = 0;
};

/// min_{theta, d} 0.5 ||y - A theta - B d||^2 + lambda ||theta||_1.
///
/// The free block is eliminated exactly by projecting onto the orthogonal
/// complement of range(B); the remaining l1 problem runs accelerated proximal
/// gradient with backtracking, restarts, and a periodic exact polish of the
/// active set. Terminates when the duality gap (with the dual candidate kept
/// feasible for the free block by construction) drops below tol. Throws
/// RankDeficientNullBlockError when B loses column rank and NoConvergenceError
/// at the iteration cap.
LassoSolution solve_lasso_free_block(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const Eigen::VectorXd& y, double lambda,
                                     const LassoOptions& opt = {});

/// Smallest lambda for which theta = 0 is optimal.
double lambda_max(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& y);

/// Moves theta along measurement- and cost-preserving null directions of the
/// projected dictionary until at most `bound` coefficients remain nonzero.
/// Directions come from the trailing right-singular vectors of the active
/// submatrix stacked with the sign row; the step zeroing the smallest
/// coefficient is taken first. Throws NumericalStallError when no null
/// direction is found while the support still exceeds the bound.
Eigen::VectorXd reduce_support(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::VectorXd& theta, int bound);

}  // namespace tps
