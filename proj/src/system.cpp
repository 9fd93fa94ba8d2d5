#include "tps/system.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tps/errors.hpp"

namespace tps {

namespace {

/// Shifted Legendre polynomial of degree `deg` on [0, width], as monomial
/// coefficients in the local variable s.
std::vector<double> shifted_legendre(int deg, double width) {
    // u = 2 s / width - 1 maps [0, width] to [-1, 1]
    const std::vector<double> u = {-1.0, 2.0 / width};
    std::vector<std::vector<double>> p(std::size_t(deg) + 1);
    p[0] = {1.0};
    if (deg >= 1) p[1] = u;
    auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> c(a.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    for (int n = 1; n < deg; ++n) {
        auto up = mul(u, p[std::size_t(n)]);
        std::vector<double> next(up.size(), 0.0);
        for (std::size_t i = 0; i < up.size(); ++i) next[i] = (2.0 * n + 1.0) * up[i];
        for (std::size_t i = 0; i < p[std::size_t(n) - 1].size(); ++i)
            next[i] -= double(n) * p[std::size_t(n) - 1][i];
        for (double& c : next) c /= double(n + 1);
        p[std::size_t(n) + 1] = std::move(next);
    }
    return p[std::size_t(deg)];
}

}  // namespace

void AdmissibleSystem::build_nullspace() {
    p_.clear();
    p_.reserve(std::size_t(odo_.order));
    for (int n = 1; n <= odo_.order; ++n) p_.push_back(nullspace_ppe(odo_, n, anchor_));
}

AdmissibleSystem AdmissibleSystem::universal(const Odo& odo, Interval support,
                                             std::vector<PiecewisePolyExp> generators,
                                             double anchor) {
    validate_odo(odo);
    validate_interval(support, "universal system support");
    const int n = odo.order;
    if (int(generators.size()) != n)
        throw std::invalid_argument("universal system: need exactly N generators");
    for (const auto& g : generators) {
        const auto supp = g.support();
        if (supp && (supp->lo < support.lo - 1e-12 || supp->hi > support.hi + 1e-12))
            throw std::invalid_argument("universal system: generator outside declared support");
    }

    AdmissibleSystem sys;
    sys.odo_ = odo;
    sys.kind_ = SystemKind::Universal;
    sys.anchor_ = anchor;
    sys.phi_support_ = support;
    sys.build_nullspace();

    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gram(i, j) = inner_product(sys.p_[std::size_t(i)], generators[std::size_t(j)]);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    const double det = lu.determinant();
    const double scale = std::pow(gram.norm(), double(n));
    if (std::abs(det) < 1e-12 * scale || scale == 0.0)
        throw SingularGramError("universal system: generator Gram matrix is singular (|det| = " +
                                std::to_string(std::abs(det)) + ")");
    const Eigen::MatrixXd weights = lu.inverse().transpose();  // phi = G^{-T} generators

    sys.phi_.assign(std::size_t(n), PiecewisePolyExp{});
    for (int m = 0; m < n; ++m) {
        PiecewisePolyExp acc;
        for (int j = 0; j < n; ++j)
            acc = acc + generators[std::size_t(j)].scaled(weights(m, j));
        sys.phi_[std::size_t(m)] = std::move(acc);
    }
    return sys;
}

AdmissibleSystem AdmissibleSystem::universal(const Odo& odo, Interval support, double anchor) {
    validate_odo(odo);
    validate_interval(support, "universal system support");
    const int k = std::max(2, odo.order);
    const PiecewisePolyExp envelope = PiecewisePolyExp::bump(support, k);
    std::vector<PiecewisePolyExp> generators;
    generators.reserve(std::size_t(odo.order));
    for (int m = 0; m < odo.order; ++m) {
        const auto q = shifted_legendre(m, support.hi - support.lo);
        generators.push_back(envelope *
                             PiecewisePolyExp::exp_poly_on(support, q, 0.0, support.lo));
    }
    return universal(odo, support, std::move(generators), anchor);
}

AdmissibleSystem AdmissibleSystem::localized(const Odo& odo, Interval domain) {
    return localized(odo, domain, domain);
}

AdmissibleSystem AdmissibleSystem::localized(const Odo& odo, Interval domain, Interval support) {
    validate_interval(domain, "localized system domain");
    if (support.lo < domain.lo || support.hi > domain.hi)
        throw std::invalid_argument("localized system: [phi-, phi+] must lie inside K");
    AdmissibleSystem sys = universal(odo, support, domain.lo);
    sys.kind_ = SystemKind::KLocalized;
    sys.domain_ = domain;
    return sys;
}

AdmissibleSystem AdmissibleSystem::fundamental(const Odo& odo, Interval domain) {
    validate_odo(odo);
    validate_interval(domain, "fundamental system domain");
    AdmissibleSystem sys;
    sys.odo_ = odo;
    sys.kind_ = SystemKind::KFundamental;
    sys.anchor_ = domain.lo;
    sys.domain_ = domain;
    sys.phi_support_ = Interval{domain.lo, domain.lo};  // point evaluations at K^-
    sys.build_nullspace();
    return sys;
}

double AdmissibleSystem::nullspace(int n, double t) const {
    return nullspace_eval(odo_, n, anchor_, t);
}

const PiecewisePolyExp& AdmissibleSystem::nullspace_basis(int n) const {
    if (n < 1 || n > odo_.order) throw std::out_of_range("nullspace_basis: index out of range");
    return p_[std::size_t(n) - 1];
}

std::vector<double> AdmissibleSystem::project(const PiecewisePolyExp& f) const {
    const int n = odo_.order;
    std::vector<double> c(std::size_t(n), 0.0);
    if (kind_ == SystemKind::KFundamental) {
        const double km = domain_->lo;
        PiecewisePolyExp h = f;
        for (int i = 1; i <= n; ++i) {
            c[std::size_t(i) - 1] = (i == n) ? h.eval_left(km) : h.eval(km);
            if (i < n) h = h.derivative() - h.scaled(odo_.alpha);
        }
    } else {
        for (int i = 0; i < n; ++i) c[std::size_t(i)] = inner_product(f, phi_[std::size_t(i)]);
    }
    return c;
}

std::vector<double> AdmissibleSystem::project_green(double x) const {
    const int n = odo_.order;
    std::vector<double> c(std::size_t(n), 0.0);
    if (kind_ == SystemKind::KFundamental) {
        const double s = domain_->lo - x;
        for (int i = 1; i <= n; ++i) {
            // (D - alpha I)^{i-1} g_L is the causal Green's function of order N-i+1
            if (i == n) {
                c[std::size_t(i) - 1] = (s > 0.0) ? exp_monomial(odo_.alpha, 0, s) : 0.0;
            } else {
                c[std::size_t(i) - 1] = green_eval(Odo{odo_.alpha, odo_.order - i + 1}, s);
            }
        }
    } else {
        const Interval supp = *phi_support_;
        const double lo = std::max(x, supp.lo);
        if (lo < supp.hi) {
            // on v >= x the Green's function equals the exponential monomial
            const PiecewisePolyExp tail = exp_monomial_ppe(odo_, x).restricted(Interval{lo, supp.hi});
            for (int i = 0; i < n; ++i)
                c[std::size_t(i)] = inner_product(tail, phi_[std::size_t(i)]);
        }
    }
    return c;
}

double AdmissibleSystem::kernel(double t, double x) const {
    const int n = odo_.order;
    if (kind_ == SystemKind::KFundamental) {
        if (x >= domain_->lo) return green_eval(odo_, t - x);
        const double s = t - x;
        return green_eval(odo_, s) - exp_monomial(odo_.alpha, n - 1, s);
    }
    const Interval supp = *phi_support_;
    if (x <= supp.lo) {
        // Left of the analysis window the correction coefficients vanish and
        // the kernel collapses to the anticausal remainder g_L - E, which is
        // exactly zero for t > x because both halves share one code path.
        const double s = t - x;
        return green_eval(odo_, s) - exp_monomial(odo_.alpha, n - 1, s);
    }
    const std::vector<double> w = project_green(x);
    double acc = green_eval(odo_, t - x);
    for (int i = 0; i < n; ++i) acc -= w[std::size_t(i)] * nullspace(i + 1, t);
    return acc;
}

PiecewisePolyExp AdmissibleSystem::kernel_section(double x) const {
    const int n = odo_.order;
    if (kind_ == SystemKind::KFundamental) {
        if (x >= domain_->lo) return green_ppe(odo_, x);
        return green_ppe(odo_, x) - exp_monomial_ppe(odo_, x);
    }
    const Interval supp = *phi_support_;
    if (x <= supp.lo) return green_ppe(odo_, x) - exp_monomial_ppe(odo_, x);
    const std::vector<double> w = project_green(x);
    PiecewisePolyExp acc = green_ppe(odo_, x);
    for (int i = 0; i < n; ++i)
        acc = acc - p_[std::size_t(i)].scaled(w[std::size_t(i)]);
    return acc;
}

double AdmissibleSystem::biorthogonality_residual() const {
    double worst = 0.0;
    for (int m = 1; m <= odo_.order; ++m) {
        const auto c = project(p_[std::size_t(m) - 1]);
        for (int i = 1; i <= odo_.order; ++i) {
            const double target = (i == m) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(c[std::size_t(i) - 1] - target));
        }
    }
    return worst;
}

}  // namespace tps
