#include "tps/lasso.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "tps/errors.hpp"

namespace tps {

namespace {

struct FreeBlockBasis {
    Eigen::MatrixXd q1;  // orthonormal basis of range(B), M x q
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    bool empty = false;

    Eigen::VectorXd project_out(const Eigen::VectorXd& v) const {
        if (empty) return v;
        return v - q1 * (q1.transpose() * v);
    }
    Eigen::MatrixXd project_out(const Eigen::MatrixXd& m) const {
        if (empty) return m;
        return m - q1 * (q1.transpose() * m);
    }
};

FreeBlockBasis make_basis(const Eigen::MatrixXd& b) {
    FreeBlockBasis basis;
    if (b.cols() == 0) {
        basis.empty = true;
        return basis;
    }
    basis.qr.compute(b);
    if (basis.qr.rank() < b.cols())
        throw RankDeficientNullBlockError("free block lost rank: rank " +
                                          std::to_string(basis.qr.rank()) + " < " +
                                          std::to_string(b.cols()));
    Eigen::HouseholderQR<Eigen::MatrixXd> plain(b);
    basis.q1 = plain.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    return basis;
}

Eigen::VectorXd solve_free_block(const FreeBlockBasis& basis, const Eigen::VectorXd& rhs) {
    if (basis.empty) return Eigen::VectorXd(0);
    return basis.qr.solve(rhs);
}

double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double l1(const Eigen::VectorXd& v) { return v.cwiseAbs().sum(); }

/// Duality gap of the projected lasso at theta. The dual candidate is the
/// scaled residual, automatically orthogonal to range(B).
double duality_gap(const Eigen::MatrixXd& at, const Eigen::VectorXd& yt,
                   const Eigen::VectorXd& theta, double lambda, double* primal_out = nullptr) {
    const Eigen::VectorXd r = yt - at * theta;
    const double primal = 0.5 * r.squaredNorm() + lambda * l1(theta);
    double corr = 0.0;
    if (at.cols() > 0) corr = (at.transpose() * r).cwiseAbs().maxCoeff();
    const double scale = (corr > lambda && corr > 0.0) ? lambda / corr : 1.0;
    const Eigen::VectorXd u = scale * r;
    const double dual = 0.5 * yt.squaredNorm() - 0.5 * (yt - u).squaredNorm();
    if (primal_out) *primal_out = primal;
    return primal - dual;
}

}  // namespace

double lambda_max(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& y) {
    const FreeBlockBasis basis = make_basis(b);
    const Eigen::VectorXd yt = basis.project_out(y);
    if (a.cols() == 0) return 0.0;
    return (a.transpose() * yt).cwiseAbs().maxCoeff();
}

LassoSolution solve_lasso_free_block(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                     const Eigen::VectorXd& y, double lambda,
                                     const LassoOptions& opt) {
    if (lambda <= 0.0) throw std::invalid_argument("lasso: lambda must be positive");
    const FreeBlockBasis basis = make_basis(b);
    const Eigen::MatrixXd at = basis.project_out(a);
    const Eigen::VectorXd yt = basis.project_out(y);
    const long p = a.cols();

    LassoSolution sol;
    sol.theta = Eigen::VectorXd::Zero(p);

    // Lipschitz estimate ||At||_2^2 by power iteration (deterministic start).
    double lip = 1.0;
    if (p > 0) {
        Eigen::VectorXd v = at.colwise().norm().transpose();
        if (v.norm() == 0.0) v.setOnes();
        v.normalize();
        for (int i = 0; i < 100; ++i) {
            Eigen::VectorXd w = at.transpose() * (at * v);
            const double n = w.norm();
            if (n == 0.0) break;
            v = w / n;
            lip = n;
        }
        lip = std::max(lip * 1.02, 1e-300);
    }

    Eigen::VectorXd theta = sol.theta, z = sol.theta, theta_old = sol.theta;
    double t_momentum = 1.0;
    double gap = duality_gap(at, yt, theta, lambda);
    long it = 0;

    // Active-set polish: solve the sign-fixed stationarity system on the
    // union of the current support and the near-active dual set, dropping
    // sign-infeasible coordinates until the pattern settles. Accelerates the
    // proximal iteration's slow endgame without changing what it converges to
    // (the candidate is only adopted when the certified gap improves).
    auto try_polish = [&](Eigen::VectorXd& cur, double& cur_gap) {
        const Eigen::VectorXd corr = at.transpose() * (yt - at * cur);
        std::vector<long> support;
        std::vector<double> sign_of;
        for (long i = 0; i < p; ++i) {
            if (cur(i) != 0.0) {
                support.push_back(i);
                sign_of.push_back(cur(i) > 0.0 ? 1.0 : -1.0);
            } else if (std::abs(corr(i)) >= lambda * (1.0 - 1e-7)) {
                support.push_back(i);
                sign_of.push_back(corr(i) > 0.0 ? 1.0 : -1.0);
            }
        }
        const long cap = 3 * yt.size() + 16;
        if (support.empty() || long(support.size()) > cap) return;
        for (int round = 0; round < 24 && !support.empty(); ++round) {
            const long s = long(support.size());
            Eigen::MatrixXd as(at.rows(), s);
            Eigen::VectorXd sign(s);
            for (long k = 0; k < s; ++k) {
                as.col(k) = at.col(support[std::size_t(k)]);
                sign(k) = sign_of[std::size_t(k)];
            }
            const Eigen::MatrixXd gram = as.transpose() * as;
            const Eigen::VectorXd rhs = as.transpose() * yt - lambda * sign;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            if (ldlt.info() != Eigen::Success) return;
            const Eigen::VectorXd zs = ldlt.solve(rhs);
            if ((gram * zs - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return;
            std::vector<long> keep;
            std::vector<double> keep_sign;
            for (long k = 0; k < s; ++k) {
                if (zs(k) * sign(k) > 0.0) {
                    keep.push_back(support[std::size_t(k)]);
                    keep_sign.push_back(sign(k));
                }
            }
            if (long(keep.size()) == s) {
                Eigen::VectorXd candidate = Eigen::VectorXd::Zero(p);
                for (long k = 0; k < s; ++k) candidate(support[std::size_t(k)]) = zs(k);
                const double cand_gap = duality_gap(at, yt, candidate, lambda);
                if (cand_gap < cur_gap) {
                    cur = candidate;
                    cur_gap = cand_gap;
                }
                return;
            }
            support = std::move(keep);
            sign_of = std::move(keep_sign);
        }
    };

    while (gap > opt.tol && it < opt.max_iter && p > 0) {
        ++it;
        const Eigen::VectorXd grad = at.transpose() * (at * z - yt);
        theta_old = theta;
        // backtracking on the prox step
        for (;;) {
            theta = z - grad / lip;
            for (long i = 0; i < p; ++i) theta(i) = soft(theta(i), lambda / lip);
            const Eigen::VectorXd diff = theta - z;
            const double lhs = 0.5 * (yt - at * theta).squaredNorm();
            const double rhs = 0.5 * (yt - at * z).squaredNorm() + grad.dot(diff) +
                               0.5 * lip * diff.squaredNorm();
            if (lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs))) break;
            lip *= 2.0;
        }
        const Eigen::VectorXd diff = theta - theta_old;
        if ((z - theta).dot(diff) > 0.0) {
            // restart momentum when the acceleration points uphill
            z = theta;
            t_momentum = 1.0;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
            z = theta + ((t_momentum - 1.0) / t_next) * diff;
            t_momentum = t_next;
        }
        if (it % 20 == 0 || it < 4) {
            gap = duality_gap(at, yt, theta, lambda);
            if (gap > opt.tol && it % 100 == 0) {
                const double before = gap;
                try_polish(theta, gap);
                if (gap <= opt.tol) break;
                if (gap < before) {  // warm-restart the momentum from the polished point
                    z = theta;
                    t_momentum = 1.0;
                }
            }
        }
    }
    gap = duality_gap(at, yt, theta, lambda);
    if (gap > opt.tol) try_polish(theta, gap);
    if (gap > opt.tol && p > 0) throw NoConvergenceError(it, gap);

    sol.theta = theta;
    sol.d = solve_free_block(basis, y - a * theta);
    const Eigen::VectorXd residual =
        y - a * theta - (basis.empty ? Eigen::VectorXd::Zero(y.size()) : Eigen::VectorXd(b * sol.d));
    sol.objective = 0.5 * residual.squaredNorm() + lambda * l1(theta);
    sol.gap = gap;
    sol.iterations = it;
    return sol;
}

Eigen::VectorXd reduce_support(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                               const Eigen::VectorXd& theta_in, int bound) {
    const FreeBlockBasis basis = make_basis(b);
    const Eigen::MatrixXd at = basis.project_out(a);
    Eigen::VectorXd theta = theta_in;

    for (;;) {
        std::vector<long> support;
        for (long i = 0; i < theta.size(); ++i)
            if (theta(i) != 0.0) support.push_back(i);
        const long s = long(support.size());
        if (s <= bound) break;

        Eigen::MatrixXd as(at.rows(), s);
        Eigen::VectorXd sign(s);
        for (long k = 0; k < s; ++k) {
            as.col(k) = at.col(support[std::size_t(k)]);
            sign(k) = theta(support[std::size_t(k)]) > 0.0 ? 1.0 : -1.0;
        }

        // structural null space of the projected active columns
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double sigma_max = sv.size() ? sv(0) : 0.0;
        long rank = 0;
        for (long i = 0; i < sv.size(); ++i)
            if (sv(i) > std::max(1e-11 * sigma_max, 1e-300)) ++rank;
        if (rank >= s)
            throw NumericalStallError("reduce_support: no null direction at support size " +
                                      std::to_string(s) + " (bound " + std::to_string(bound) +
                                      ")");
        // combine the trailing singular vectors to cancel the sign row as well
        Eigen::VectorXd v = svd.matrixV().col(s - 1);
        if (s - rank >= 2) {
            const Eigen::VectorXd v2 = svd.matrixV().col(s - 2);
            const double w1 = sign.dot(v);
            const double w2 = sign.dot(v2);
            if (std::abs(w1) > 1e-14 || std::abs(w2) > 1e-14) {
                Eigen::VectorXd mix = w2 * v - w1 * v2;
                if (mix.norm() > 1e-14) v = mix.normalized();
            }
        }
        long pivot;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0.0) v = -v;

        // first zero-hit step in each direction
        auto first_hit = [&](const Eigen::VectorXd& dir, double& step) {
            long hit = -1;
            step = 0.0;
            for (long k = 0; k < s; ++k) {
                const double ti = theta(support[std::size_t(k)]);
                if (dir(k) == 0.0 || ti * dir(k) >= 0.0) continue;
                const double t = -ti / dir(k);
                if (hit < 0 || t < step) {
                    step = t;
                    hit = k;
                }
            }
            return hit;
        };
        double step_pos = 0.0, step_neg = 0.0;
        const long hit_pos = first_hit(v, step_pos);
        const long hit_neg = first_hit(-v, step_neg);
        if (hit_pos < 0 && hit_neg < 0)
            throw NumericalStallError("reduce_support: direction never hits zero");
        bool go_pos;
        if (hit_pos < 0) go_pos = false;
        else if (hit_neg < 0) go_pos = true;
        else {
            const double mag_pos = std::abs(theta(support[std::size_t(hit_pos)]));
            const double mag_neg = std::abs(theta(support[std::size_t(hit_neg)]));
            go_pos = mag_pos <= mag_neg;  // zero the smallest coefficient first
        }
        const Eigen::VectorXd dir = go_pos ? v : Eigen::VectorXd(-v);
        const double step = go_pos ? step_pos : step_neg;
        const long hit = go_pos ? hit_pos : hit_neg;

        for (long k = 0; k < s; ++k) theta(support[std::size_t(k)]) += step * dir(k);
        theta(support[std::size_t(hit)]) = 0.0;
        const double scale = theta.cwiseAbs().maxCoeff();
        for (long k = 0; k < s; ++k) {
            double& ti = theta(support[std::size_t(k)]);
            if (std::abs(ti) <= 1e-13 * scale) ti = 0.0;
        }
    }
    return theta;
}

}  // namespace tps
