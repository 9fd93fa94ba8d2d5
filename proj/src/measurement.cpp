#include "tps/measurement.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "tps/errors.hpp"

namespace tps {

namespace {

Rect support_of_profiles(const PiecewisePolyExp& f1, const PiecewisePolyExp& f2) {
    const auto s1 = f1.support();
    const auto s2 = f2.support();
    if (!s1 || !s2 || !std::isfinite(s1->lo) || !std::isfinite(s1->hi) ||
        !std::isfinite(s2->lo) || !std::isfinite(s2->hi))
        throw std::invalid_argument("measurement profile must be nonzero with compact support");
    return Rect{*s1, *s2};
}

/// Axis profile of an atom (shared with the spline module's conventions).
PiecewisePolyExp atom_axis_ppe(const TensorSpline& s, const TensorAtom& a, int axis) {
    const bool first = (axis == 1);
    const Odo& odo = first ? s.odo1() : s.odo2();
    const AdmissibleSystem& sys = first ? s.system1() : s.system2();
    const bool green_profile = (a.family == AtomFamily::TensorGreen) ||
                               (first ? a.family == AtomFamily::GreenPoly
                                      : a.family == AtomFamily::PolyGreen);
    if (green_profile) return green_ppe(odo, first ? a.x1 : a.x2);
    return sys.nullspace_basis(first ? a.n1 : a.n2);
}

}  // namespace

MeasurementFunctional MeasurementFunctional::dirac(double t1, double t2) {
    MeasurementFunctional fn;
    fn.kind = Kind::DiracSample;
    fn.t1 = t1;
    fn.t2 = t2;
    fn.support = Rect{Interval{t1, t1}, Interval{t2, t2}};
    return fn;
}

MeasurementFunctional MeasurementFunctional::box(const Rect& rect) {
    return box(rect, PiecewisePolyExp::constant(1.0), PiecewisePolyExp::constant(1.0));
}

MeasurementFunctional MeasurementFunctional::box(const Rect& rect,
                                                 const PiecewisePolyExp& weight1,
                                                 const PiecewisePolyExp& weight2) {
    validate_interval(rect.k1, "box functional");
    validate_interval(rect.k2, "box functional");
    MeasurementFunctional fn;
    fn.kind = Kind::SeparableBox;
    fn.f1 = weight1.restricted(rect.k1);
    fn.f2 = weight2.restricted(rect.k2);
    if (fn.f1.is_zero() || fn.f2.is_zero())
        throw std::invalid_argument("box functional: weight vanishes on the box");
    fn.support = rect;
    return fn;
}

MeasurementFunctional MeasurementFunctional::profile(const PiecewisePolyExp& f1,
                                                     const PiecewisePolyExp& f2) {
    MeasurementFunctional fn;
    fn.kind = Kind::SeparableProfile;
    fn.f1 = f1;
    fn.f2 = f2;
    fn.support = support_of_profiles(f1, f2);
    return fn;
}

std::optional<AdmissibilityViolation> check_admissible(const MeasurementFunctional& fn,
                                                       const Odo& odo1, const Odo& odo2) {
    if (fn.kind != MeasurementFunctional::Kind::DiracSample) return std::nullopt;
    if (odo1.order < 2)
        return AdmissibilityViolation{1, "DiracNeedsOrderTwo: axis 1 operator has order " +
                                             std::to_string(odo1.order)};
    if (odo2.order < 2)
        return AdmissibilityViolation{2, "DiracNeedsOrderTwo: axis 2 operator has order " +
                                             std::to_string(odo2.order)};
    return std::nullopt;
}

double measure(const TensorSpline& spline, const MeasurementFunctional& fn) {
    if (const auto violation = check_admissible(fn, spline.odo1(), spline.odo2()))
        throw AssumptionError("measure: inadmissible functional (" + violation->reason + ")");
    if (fn.kind == MeasurementFunctional::Kind::DiracSample)
        return eval(spline, fn.t1, fn.t2);
    double acc = 0.0;
    for (const auto& a : spline.atoms()) {
        if (a.weight == 0.0) continue;
        const double i1 = inner_product(atom_axis_ppe(spline, a, 1), fn.f1);
        if (i1 == 0.0) continue;
        const double i2 = inner_product(atom_axis_ppe(spline, a, 2), fn.f2);
        acc += a.weight * i1 * i2;
    }
    return acc;
}

Eigen::VectorXd measure_atom_column(const TensorAtom& atom, const ForwardOperator& fwd,
                                    const TensorSpline& context) {
    TensorAtom unit = atom;
    const TensorSpline one = context.with_atoms({unit});
    Eigen::VectorXd col(fwd.size());
    for (int m = 0; m < fwd.size(); ++m) col(m) = measure(one, fwd.functionals[std::size_t(m)]);
    return col;
}

AssumptionReport check_assumptions(const ForwardOperator& fwd, const Odo& odo1, const Odo& odo2) {
    AssumptionReport report;
    const int m = fwd.size();
    const int n1 = odo1.order;
    const int n2 = odo2.order;
    const int q = n1 * n2;
    report.count_ok = (m >= q);

    report.all_admissible = true;
    for (int i = 0; i < m; ++i) {
        if (const auto v = check_admissible(fwd.functionals[std::size_t(i)], odo1, odo2)) {
            report.all_admissible = false;
            report.violations.emplace_back(i, *v);
        }
    }

    report.supports_inside = true;
    for (int i = 0; i < m; ++i) {
        const Rect& s = fwd.functionals[std::size_t(i)].support;
        const bool inside = s.k1.lo >= fwd.domain.k1.lo && s.k1.hi <= fwd.domain.k1.hi &&
                            s.k2.lo >= fwd.domain.k2.lo && s.k2.hi <= fwd.domain.k2.hi;
        if (!inside) {
            report.supports_inside = false;
            report.outside_functionals.push_back(i);
        }
    }

    if (!report.all_admissible) return report;

    // Assumption 2, injectivity on the null space: rank of the M x (N1 N2)
    // block of null-atom measurements.
    const TensorSpline context(odo1, odo2, fwd.domain, {});
    Eigen::MatrixXd null_block(m, q);
    int col = 0;
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j)
            null_block.col(col++) =
                measure_atom_column(TensorAtom{AtomFamily::PolyPoly, i, j, 1.0, 0.0, 0.0}, fwd,
                                    context);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(null_block);
    const auto& sv = svd.singularValues();
    report.null_sigma_max = sv.size() ? sv(0) : 0.0;
    report.null_sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
    report.null_rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * report.null_sigma_max) ++report.null_rank;
    report.injective = (report.null_rank == q) && report.count_ok;

    // Surjectivity heuristic: full row rank of a probe dictionary (9x9 tensor
    // candidates plus 17-point 1D families plus the null block).
    {
        std::vector<Eigen::VectorXd> cols;
        const Interval k1 = fwd.domain.k1;
        const Interval k2 = fwd.domain.k2;
        auto lin = [](const Interval& k, int n, int i) {
            return k.lo + (k.hi - k.lo) * double(i) / double(n - 1);
        };
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                cols.push_back(measure_atom_column(
                    TensorAtom{AtomFamily::TensorGreen, 0, 0, 1.0, lin(k1, 9, i), lin(k2, 9, j)},
                    fwd, context));
        for (int n = 1; n <= n1; ++n)
            for (int i = 0; i < 17; ++i)
                cols.push_back(measure_atom_column(
                    TensorAtom{AtomFamily::PolyGreen, n, 0, 1.0, 0.0, lin(k2, 17, i)}, fwd,
                    context));
        for (int n = 1; n <= n2; ++n)
            for (int i = 0; i < 17; ++i)
                cols.push_back(measure_atom_column(
                    TensorAtom{AtomFamily::GreenPoly, 0, n, 1.0, lin(k1, 17, i), 0.0}, fwd,
                    context));
        Eigen::MatrixXd probe(m, int(cols.size()) + q);
        for (int c = 0; c < int(cols.size()); ++c) probe.col(c) = cols[std::size_t(c)];
        probe.rightCols(q) = null_block;
        Eigen::JacobiSVD<Eigen::MatrixXd> probe_svd(probe);
        const auto& psv = probe_svd.singularValues();
        int rank = 0;
        for (int i = 0; i < psv.size(); ++i)
            if (psv(i) > 1e-10 * psv(0)) ++rank;
        report.surjective_probe = (rank == m);
    }
    return report;
}

std::string AssumptionReport::summary() const {
    std::ostringstream os;
    os << "assumption check:\n";
    os << "  measurement count vs null dimension: " << (count_ok ? "PASS" : "FAIL") << "\n";
    os << "  injectivity on null space: " << (injective ? "PASS" : "FAIL") << " (rank "
       << null_rank << ", sigma " << null_sigma_min << " .. " << null_sigma_max << ")\n";
    os << "  supports inside K: " << (supports_inside ? "PASS" : "FAIL");
    for (int i : outside_functionals) os << " [functional " << i << " outside]";
    os << "\n";
    os << "  admissibility: " << (all_admissible ? "PASS" : "FAIL");
    for (const auto& [i, v] : violations) os << " [functional " << i << ": " << v.reason << "]";
    os << "\n";
    os << "  surjectivity probe (heuristic): " << (surjective_probe ? "PASS" : "FAIL") << "\n";
    os << "  " << weak_star_note << "\n";
    return os.str();
}

}  // namespace tps
