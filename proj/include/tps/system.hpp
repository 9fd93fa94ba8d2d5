#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "tps/odo.hpp"
#include "tps/piecewise.hpp"

namespace tps {

enum class SystemKind { Universal, KLocalized, KFundamental };

/// A null-space basis p together with biorthogonal analysis functionals phi
/// (compactly supported functions for the universal/localized kinds, boundary
/// derivative evaluations with a left limit for the fundamental kind).
class AdmissibleSystem {
public:
    /// Builds phi from N linearly independent compactly supported generators
    /// by inverting the Gram matrix <p_n, generator_m>. Throws
    /// SingularGramError when the Gram determinant is below the scale-aware
    /// threshold 1e-12 * ||G||_F^N.
    static AdmissibleSystem universal(const Odo& odo, Interval support,
                                      std::vector<PiecewisePolyExp> generators,
                                      double anchor = 0.0);

    /// Same with the default generator family: bump(support, k) * q_m with
    /// q_m the shifted Legendre polynomial of degree m-1 and k = max(2, N).
    static AdmissibleSystem universal(const Odo& odo, Interval support, double anchor = 0.0);

    /// Universal system whose analysis supports lie inside the domain K.
    static AdmissibleSystem localized(const Odo& odo, Interval domain);
    static AdmissibleSystem localized(const Odo& odo, Interval domain, Interval support);

    /// The unique K-fundamental system: p_n anchored at K^-, iota_n the
    /// (D - alpha I)^{n-1} evaluations at K^- (left limit at n = N).
    static AdmissibleSystem fundamental(const Odo& odo, Interval domain);

    const Odo& odo() const { return odo_; }
    SystemKind kind() const { return kind_; }
    double anchor() const { return anchor_; }
    const std::optional<Interval>& domain() const { return domain_; }
    const std::optional<Interval>& phi_support() const { return phi_support_; }
    const std::vector<PiecewisePolyExp>& phi() const { return phi_; }

    double nullspace(int n, double t) const;
    const PiecewisePolyExp& nullspace_basis(int n) const;

    /// Analysis coefficients <f, phi_n> (resp. iota_n(f)), n = 1..N.
    std::vector<double> project(const PiecewisePolyExp& f) const;

    /// Analysis coefficients of the shifted Green's function g_L(. - x).
    std::vector<double> project_green(double x) const;

    /// Kernel g_phi(t, x) of Eq-style g_L(t-x) minus its null-space correction.
    /// Evaluated through one of two algebraically identical forms so that the
    /// support-zero regions come out exactly zero in floating point.
    double kernel(double t, double x) const;

    /// g_phi(., x) as a function of t.
    PiecewisePolyExp kernel_section(double x) const;

    /// max_{n,m} |<p_n, phi_m> - delta_{nm}|.
    double biorthogonality_residual() const;

private:
    Odo odo_;
    SystemKind kind_ = SystemKind::Universal;
    double anchor_ = 0.0;
    std::optional<Interval> domain_;
    std::optional<Interval> phi_support_;
    std::vector<PiecewisePolyExp> phi_;
    std::vector<PiecewisePolyExp> p_;

    void build_nullspace();
};

using SystemPtr = std::shared_ptr<const AdmissibleSystem>;

}  // namespace tps
