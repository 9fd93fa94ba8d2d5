#include "tps/spline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "tps/errors.hpp"

namespace tps {

namespace {

constexpr double kKnotTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kKnotTol; }

/// Merges (location, weight) pairs whose locations agree within kKnotTol and
/// returns the total variation sum |w| of the merged list.
double merged_mass(std::vector<Dirac1D> pts) {
    std::sort(pts.begin(), pts.end(), [](const Dirac1D& a, const Dirac1D& b) { return a.x < b.x; });
    double total = 0.0;
    std::size_t i = 0;
    while (i < pts.size()) {
        double w = pts[i].w;
        std::size_t j = i + 1;
        while (j < pts.size() && near(pts[j].x, pts[i].x)) w += pts[j++].w;
        total += std::abs(w);
        i = j;
    }
    return total;
}

double merged_mass_2d(std::vector<Dirac2D> pts) {
    std::sort(pts.begin(), pts.end(), [](const Dirac2D& a, const Dirac2D& b) {
        return a.x1 != b.x1 ? a.x1 < b.x1 : a.x2 < b.x2;
    });
    double total = 0.0;
    std::size_t i = 0;
    while (i < pts.size()) {
        double w = pts[i].w;
        std::size_t j = i + 1;
        while (j < pts.size() && near(pts[j].x1, pts[i].x1) && near(pts[j].x2, pts[i].x2))
            w += pts[j++].w;
        total += std::abs(w);
        i = j;
    }
    return total;
}

/// Derivative evaluation used by the acausal boundary terms:
/// value of (D - alpha I)^{n-1} applied to the axis profile of an atom,
/// taken at boundary point `t` with the requested one-sided limit.
double profile_derivative_value(const Odo& odo, bool green_profile, int null_index, double knot,
                                double anchor, int n, double t, bool left_limit) {
    if (green_profile) {
        const int ord = odo.order - n + 1;  // (D-a)^{n-1} g_N = g_{N-n+1}
        const double s = t - knot;
        if (left_limit) return (s > 0.0) ? exp_monomial(odo.alpha, ord - 1, s) : 0.0;
        return green_eval(Odo{odo.alpha, ord}, s);
    }
    const int k = null_index - n;  // (D-a)^{n-1} p_j = p_{j-n+1}
    if (k < 0) return 0.0;
    return exp_monomial(odo.alpha, k, t - anchor);
}

void validate_atom(const TensorAtom& a, const Odo& odo1, const Odo& odo2) {
    if (!std::isfinite(a.weight)) throw std::invalid_argument("TensorAtom: weight must be finite");
    auto check1 = [&] {
        if (a.n1 < 1 || a.n1 > odo1.order)
            throw std::invalid_argument("TensorAtom: axis-1 null index out of range");
    };
    auto check2 = [&] {
        if (a.n2 < 1 || a.n2 > odo2.order)
            throw std::invalid_argument("TensorAtom: axis-2 null index out of range");
    };
    switch (a.family) {
        case AtomFamily::TensorGreen: break;
        case AtomFamily::PolyGreen: check1(); break;
        case AtomFamily::GreenPoly: check2(); break;
        case AtomFamily::PolyPoly: check1(); check2(); break;
    }
}

}  // namespace

const char* family_name(AtomFamily f) {
    switch (f) {
        case AtomFamily::TensorGreen: return "tensor_green";
        case AtomFamily::PolyGreen: return "poly_green";
        case AtomFamily::GreenPoly: return "green_poly";
        case AtomFamily::PolyPoly: return "poly_poly";
    }
    return "?";
}

AtomFamily family_from_name(const std::string& name) {
    if (name == "tensor_green") return AtomFamily::TensorGreen;
    if (name == "poly_green") return AtomFamily::PolyGreen;
    if (name == "green_poly") return AtomFamily::GreenPoly;
    if (name == "poly_poly") return AtomFamily::PolyPoly;
    throw DocumentError("unknown atom family: " + name);
}

TestFunction TestFunction::bump(Interval support, int order, double scale) {
    TestFunction t;
    t.f = PiecewisePolyExp::bump(support, order).scaled(scale);
    t.order_limit = order;
    return t;
}

TensorSpline::TensorSpline(const Odo& odo1, const Odo& odo2, const Rect& domain,
                           std::vector<TensorAtom> atoms)
    : odo1_(odo1), odo2_(odo2), domain_(domain), atoms_(std::move(atoms)) {
    validate_odo(odo1);
    validate_odo(odo2);
    validate_interval(domain.k1, "spline domain K1");
    validate_interval(domain.k2, "spline domain K2");
    for (const auto& a : atoms_) validate_atom(a, odo1_, odo2_);
    sys1_ = std::make_shared<AdmissibleSystem>(AdmissibleSystem::fundamental(odo1_, domain.k1));
    sys2_ = std::make_shared<AdmissibleSystem>(AdmissibleSystem::fundamental(odo2_, domain.k2));
}

TensorSpline TensorSpline::with_atoms(std::vector<TensorAtom> atoms) const {
    TensorSpline copy = *this;
    for (const auto& a : atoms) validate_atom(a, odo1_, odo2_);
    copy.atoms_ = std::move(atoms);
    return copy;
}

int TensorSpline::sparsity_count() const {
    int count = 0;
    for (const auto& a : atoms_)
        if (a.family != AtomFamily::PolyPoly) ++count;
    return count;
}

double eval(const TensorSpline& s, double t1, double t2) {
    const double a1 = s.domain().k1.lo;
    const double a2 = s.domain().k2.lo;
    double acc = 0.0;
    for (const auto& a : s.atoms()) {
        switch (a.family) {
            case AtomFamily::TensorGreen:
                acc += a.weight * green_eval(s.odo1(), t1 - a.x1) * green_eval(s.odo2(), t2 - a.x2);
                break;
            case AtomFamily::PolyGreen:
                acc += a.weight * nullspace_eval(s.odo1(), a.n1, a1, t1) *
                       green_eval(s.odo2(), t2 - a.x2);
                break;
            case AtomFamily::GreenPoly:
                acc += a.weight * green_eval(s.odo1(), t1 - a.x1) *
                       nullspace_eval(s.odo2(), a.n2, a2, t2);
                break;
            case AtomFamily::PolyPoly:
                acc += a.weight * nullspace_eval(s.odo1(), a.n1, a1, t1) *
                       nullspace_eval(s.odo2(), a.n2, a2, t2);
                break;
        }
    }
    return acc;
}

InnovationTriple innovation(const TensorSpline& s) {
    InnovationTriple triple;
    triple.per_null1.assign(std::size_t(s.odo1().order), {});
    triple.per_null2.assign(std::size_t(s.odo2().order), {});
    triple.null_matrix = Eigen::MatrixXd::Zero(s.odo1().order, s.odo2().order);
    for (const auto& a : s.atoms()) {
        switch (a.family) {
            case AtomFamily::TensorGreen:
                triple.full2d.push_back({a.x1, a.x2, a.weight});
                break;
            case AtomFamily::PolyGreen:
                triple.per_null1[std::size_t(a.n1) - 1].push_back({a.x2, a.weight});
                break;
            case AtomFamily::GreenPoly:
                triple.per_null2[std::size_t(a.n2) - 1].push_back({a.x1, a.weight});
                break;
            case AtomFamily::PolyPoly:
                triple.null_matrix(a.n1 - 1, a.n2 - 1) += a.weight;
                break;
        }
    }
    return triple;
}

namespace {

/// Per-axis profile of an atom as a PiecewisePolyExp.
PiecewisePolyExp axis_profile(const TensorSpline& s, const TensorAtom& a, int axis) {
    const bool first = (axis == 1);
    const Odo& odo = first ? s.odo1() : s.odo2();
    const AdmissibleSystem& sys = first ? s.system1() : s.system2();
    switch (a.family) {
        case AtomFamily::TensorGreen:
            return green_ppe(odo, first ? a.x1 : a.x2);
        case AtomFamily::PolyGreen:
            return first ? sys.nullspace_basis(a.n1) : green_ppe(odo, a.x2);
        case AtomFamily::GreenPoly:
            return first ? green_ppe(odo, a.x1) : sys.nullspace_basis(a.n2);
        case AtomFamily::PolyPoly:
            return sys.nullspace_basis(first ? a.n1 : a.n2);
    }
    return {};
}

/// Projection coefficients of an atom's axis profile under the spline's own
/// (fundamental) system: exact unit vectors for null-space profiles, exact
/// zeros for interior Green profiles.
std::vector<double> axis_projection(const TensorSpline& s, const TensorAtom& a, int axis) {
    const bool first = (axis == 1);
    const AdmissibleSystem& sys = first ? s.system1() : s.system2();
    const int n = (first ? s.odo1() : s.odo2()).order;
    std::vector<double> c(std::size_t(n), 0.0);
    const bool green_profile = (a.family == AtomFamily::TensorGreen) ||
                               (first ? a.family == AtomFamily::GreenPoly
                                      : a.family == AtomFamily::PolyGreen);
    if (green_profile) return sys.project_green(first ? a.x1 : a.x2);
    const int idx = first ? a.n1 : a.n2;
    c[std::size_t(idx) - 1] = 1.0;
    return c;
}

}  // namespace

double weak_action(const TensorSpline& s, const TestFunction& psi1, const TestFunction& psi2,
                   TensorOp op) {
    const int n1 = s.odo1().order;
    const int n2 = s.odo2().order;
    const bool deriv1 = (op == TensorOp::L1L2 || op == TensorOp::L1Proj);
    const bool deriv2 = (op == TensorOp::L1L2 || op == TensorOp::ProjL2);
    if (deriv1 && psi1.order_limit < n1)
        throw InsufficientSmoothnessError("weak_action: psi1 regularity " +
                                          std::to_string(psi1.order_limit) + " < operator order " +
                                          std::to_string(n1));
    if (deriv2 && psi2.order_limit < n2)
        throw InsufficientSmoothnessError("weak_action: psi2 regularity " +
                                          std::to_string(psi2.order_limit) + " < operator order " +
                                          std::to_string(n2));

    const PiecewisePolyExp adj1 = deriv1 ? apply_adjoint(s.odo1(), psi1.f) : PiecewisePolyExp{};
    const PiecewisePolyExp adj2 = deriv2 ? apply_adjoint(s.odo2(), psi2.f) : PiecewisePolyExp{};

    // <p_n, psi> per axis, needed by the projection sides.
    std::vector<double> p_psi1(std::size_t(n1), 0.0), p_psi2(std::size_t(n2), 0.0);
    if (!deriv1)
        for (int n = 1; n <= n1; ++n)
            p_psi1[std::size_t(n) - 1] = inner_product(s.system1().nullspace_basis(n), psi1.f);
    if (!deriv2)
        for (int n = 1; n <= n2; ++n)
            p_psi2[std::size_t(n) - 1] = inner_product(s.system2().nullspace_basis(n), psi2.f);

    double acc = 0.0;
    for (const auto& a : s.atoms()) {
        double f1;
        if (deriv1) {
            f1 = inner_product(axis_profile(s, a, 1), adj1);
        } else {
            const auto c = axis_projection(s, a, 1);
            f1 = 0.0;
            for (int n = 0; n < n1; ++n) f1 += c[std::size_t(n)] * p_psi1[std::size_t(n)];
        }
        if (f1 == 0.0) continue;
        double f2;
        if (deriv2) {
            f2 = inner_product(axis_profile(s, a, 2), adj2);
        } else {
            const auto c = axis_projection(s, a, 2);
            f2 = 0.0;
            for (int n = 0; n < n2; ++n) f2 += c[std::size_t(n)] * p_psi2[std::size_t(n)];
        }
        acc += a.weight * f1 * f2;
    }
    return acc;
}

double innovation_pairing(const InnovationTriple& triple, const TensorSpline& s,
                          const TestFunction& psi1, const TestFunction& psi2, TensorOp op) {
    double acc = 0.0;
    switch (op) {
        case TensorOp::L1L2:
            for (const auto& d : triple.full2d) acc += d.w * psi1.f.eval(d.x1) * psi2.f.eval(d.x2);
            return acc;
        case TensorOp::ProjL2:
            for (int n = 1; n <= s.odo1().order; ++n) {
                const double pn = inner_product(s.system1().nullspace_basis(n), psi1.f);
                for (const auto& d : triple.per_null1[std::size_t(n) - 1])
                    acc += pn * d.w * psi2.f.eval(d.x);
            }
            return acc;
        case TensorOp::L1Proj:
            for (int n = 1; n <= s.odo2().order; ++n) {
                const double pn = inner_product(s.system2().nullspace_basis(n), psi2.f);
                for (const auto& d : triple.per_null2[std::size_t(n) - 1])
                    acc += pn * d.w * psi1.f.eval(d.x);
            }
            return acc;
    }
    return acc;
}

double seminorm(const TensorSpline& s, SeminormVariant variant) {
    if (variant == SeminormVariant::Causal) {
        double total = 0.0;
        for (const auto& a : s.atoms())
            if (a.family != AtomFamily::PolyPoly) total += std::abs(a.weight);
        return total;
    }

    // Acausal variant: the mixed-derivative mass plus boundary masses on all
    // four edges. Lower edges take left limits, upper edges right limits.
    const Rect& dom = s.domain();
    double total = 0.0;
    {
        std::vector<Dirac2D> full;
        for (const auto& a : s.atoms())
            if (a.family == AtomFamily::TensorGreen) full.push_back({a.x1, a.x2, a.weight});
        total += merged_mass_2d(std::move(full));
    }
    const double anchors[2] = {dom.k1.lo, dom.k2.lo};
    for (int axis = 1; axis <= 2; ++axis) {
        const Odo& odo = (axis == 1) ? s.odo1() : s.odo2();
        const Interval& k = (axis == 1) ? dom.k1 : dom.k2;
        for (int n = 1; n <= odo.order; ++n) {
            for (const bool upper : {false, true}) {
                const double t = upper ? k.hi : k.lo;
                std::vector<Dirac1D> line;
                for (const auto& a : s.atoms()) {
                    // contributions whose other axis still carries L at full order
                    double coef = 0.0, loc = 0.0;
                    if (axis == 1) {
                        if (a.family == AtomFamily::TensorGreen) {
                            coef = profile_derivative_value(odo, true, 0, a.x1, anchors[0], n, t,
                                                            !upper);
                            loc = a.x2;
                        } else if (a.family == AtomFamily::PolyGreen) {
                            coef = profile_derivative_value(odo, false, a.n1, 0.0, anchors[0], n,
                                                            t, !upper);
                            loc = a.x2;
                        }
                    } else {
                        if (a.family == AtomFamily::TensorGreen) {
                            coef = profile_derivative_value(odo, true, 0, a.x2, anchors[1], n, t,
                                                            !upper);
                            loc = a.x1;
                        } else if (a.family == AtomFamily::GreenPoly) {
                            coef = profile_derivative_value(odo, false, a.n2, 0.0, anchors[1], n,
                                                            t, !upper);
                            loc = a.x1;
                        }
                    }
                    if (coef != 0.0 && a.weight != 0.0) line.push_back({loc, coef * a.weight});
                }
                total += merged_mass(std::move(line));
            }
        }
    }
    return total;
}

TensorSpline canonicalize(const TensorSpline& s) {
    const Rect& dom = s.domain();
    const int n1 = s.odo1().order;
    const int n2 = s.odo2().order;
    std::vector<TensorAtom> out;
    out.reserve(s.atoms().size());
    for (TensorAtom a : s.atoms()) {
        if (a.weight == 0.0) continue;
        switch (a.family) {
            case AtomFamily::TensorGreen: {
                if (near(a.x1, dom.k1.hi) || near(a.x2, dom.k2.hi)) continue;  // vanishes on K
                const bool lo1 = near(a.x1, dom.k1.lo);
                const bool lo2 = near(a.x2, dom.k2.lo);
                if (lo1 && lo2) {
                    a = TensorAtom{AtomFamily::PolyPoly, n1, n2, a.weight, 0.0, 0.0};
                } else if (lo1) {
                    a = TensorAtom{AtomFamily::PolyGreen, n1, 0, a.weight, 0.0, a.x2};
                } else if (lo2) {
                    a = TensorAtom{AtomFamily::GreenPoly, 0, n2, a.weight, a.x1, 0.0};
                }
                break;
            }
            case AtomFamily::PolyGreen: {
                if (near(a.x2, dom.k2.hi)) continue;
                if (near(a.x2, dom.k2.lo))
                    a = TensorAtom{AtomFamily::PolyPoly, a.n1, n2, a.weight, 0.0, 0.0};
                break;
            }
            case AtomFamily::GreenPoly: {
                if (near(a.x1, dom.k1.hi)) continue;
                if (near(a.x1, dom.k1.lo))
                    a = TensorAtom{AtomFamily::PolyPoly, n1, a.n2, a.weight, 0.0, 0.0};
                break;
            }
            case AtomFamily::PolyPoly: break;
        }
        out.push_back(a);
    }

    // merge atoms with identical variant, indices, and knots (within 1e-12)
    std::vector<TensorAtom> merged;
    for (const auto& a : out) {
        bool found = false;
        for (auto& b : merged) {
            if (a.family != b.family || a.n1 != b.n1 || a.n2 != b.n2) continue;
            const bool same_knot = [&] {
                switch (a.family) {
                    case AtomFamily::TensorGreen: return near(a.x1, b.x1) && near(a.x2, b.x2);
                    case AtomFamily::PolyGreen: return near(a.x2, b.x2);
                    case AtomFamily::GreenPoly: return near(a.x1, b.x1);
                    case AtomFamily::PolyPoly: return true;
                }
                return false;
            }();
            if (same_knot) {
                b.weight += a.weight;
                found = true;
                break;
            }
        }
        if (!found) merged.push_back(a);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const TensorAtom& a) { return a.weight == 0.0; }),
                 merged.end());
    return s.with_atoms(std::move(merged));
}

bool is_canonical(const TensorSpline& s) {
    const Rect& dom = s.domain();
    for (const auto& a : s.atoms()) {
        switch (a.family) {
            case AtomFamily::TensorGreen:
                if (!dom.k1.contains_open(a.x1) || !dom.k2.contains_open(a.x2)) {
                    if (dom.contains(a.x1, a.x2)) return false;  // edge knot, rewritable
                }
                break;
            case AtomFamily::PolyGreen:
                if (!dom.k2.contains_open(a.x2) && dom.k2.contains(a.x2)) return false;
                break;
            case AtomFamily::GreenPoly:
                if (!dom.k1.contains_open(a.x1) && dom.k1.contains(a.x1)) return false;
                break;
            case AtomFamily::PolyPoly: break;
        }
    }
    return true;
}

std::array<TensorSpline, 4> decompose(const TensorSpline& s) {
    std::array<std::vector<TensorAtom>, 4> parts;
    for (const auto& a : s.atoms()) parts[std::size_t(a.family)].push_back(a);
    return {s.with_atoms(std::move(parts[0])), s.with_atoms(std::move(parts[1])),
            s.with_atoms(std::move(parts[2])), s.with_atoms(std::move(parts[3]))};
}

namespace {

double finite_difference(const TensorSpline& s, int d1, int d2, double t1, double t2, double h) {
    // tensor-product central differences
    std::vector<double> c1(std::size_t(d1) + 1), c2(std::size_t(d2) + 1);
    auto fill = [](std::vector<double>& c, int d) {
        double binom = 1.0;
        for (int j = 0; j <= d; ++j) {
            c[std::size_t(j)] = ((j % 2) ? -binom : binom);
            binom = binom * double(d - j) / double(j + 1);
        }
    };
    fill(c1, d1);
    fill(c2, d2);
    double acc = 0.0;
    for (int i = 0; i <= d1; ++i) {
        const double u1 = t1 + (0.5 * d1 - i) * h;
        for (int j = 0; j <= d2; ++j) {
            const double u2 = t2 + (0.5 * d2 - j) * h;
            acc += c1[std::size_t(i)] * c2[std::size_t(j)] * eval(s, u1, u2);
        }
    }
    return acc / std::pow(h, double(d1 + d2));
}

std::vector<double> knot_coordinates(const TensorSpline& s, int axis) {
    std::vector<double> knots;
    for (const auto& a : s.atoms()) {
        if (axis == 1 && (a.family == AtomFamily::TensorGreen || a.family == AtomFamily::GreenPoly))
            knots.push_back(a.x1);
        if (axis == 2 && (a.family == AtomFamily::TensorGreen || a.family == AtomFamily::PolyGreen))
            knots.push_back(a.x2);
    }
    return knots;
}

double dodge_knots(double c, const std::vector<double>& knots, double reach, double eps) {
    for (int tries = 0; tries < 8; ++tries) {
        bool clean = true;
        for (double u : knots) {
            if (std::abs(c - u) < reach + eps) {
                c = u + reach + 2.0 * eps;
                clean = false;
            }
        }
        if (clean) break;
    }
    return c;
}

}  // namespace

RegularityReport regularity_probe(const TensorSpline& s, int d1, int d2, const Rect& sample_box) {
    if (d1 < 0 || d2 < 0) throw std::invalid_argument("regularity_probe: negative order");
    if (d1 >= s.odo1().order || d2 >= s.odo2().order)
        throw OrderTooHighError("regularity_probe: order (" + std::to_string(d1) + "," +
                                std::to_string(d2) + ") hits the Dirac part of orders (" +
                                std::to_string(s.odo1().order) + "," +
                                std::to_string(s.odo2().order) + ")");
    constexpr int kGrid = 64;
    constexpr double kStep = 1e-3;
    constexpr double kOffset = 1e-4;
    const auto knots1 = knot_coordinates(s, 1);
    const auto knots2 = knot_coordinates(s, 2);

    auto max_abs = [&](double h) {
        double worst = 0.0;
        for (int i = 0; i < kGrid; ++i) {
            double t1 = sample_box.k1.lo + (i + 0.5) * sample_box.k1.length() / kGrid;
            t1 = dodge_knots(t1, knots1, 0.5 * d1 * h, kOffset);
            for (int j = 0; j < kGrid; ++j) {
                double t2 = sample_box.k2.lo + (j + 0.5) * sample_box.k2.length() / kGrid;
                t2 = dodge_knots(t2, knots2, 0.5 * d2 * h, kOffset);
                worst = std::max(worst, std::abs(finite_difference(s, d1, d2, t1, t2, h)));
            }
        }
        return worst;
    };

    RegularityReport report;
    const double coarse = max_abs(kStep);
    const double fine = max_abs(0.5 * kStep);
    report.max_abs = coarse;
    report.bounded = std::isfinite(coarse) && std::isfinite(fine) &&
                     fine <= 2.0 * coarse + 1e-9;
    return report;
}

double full_norm(const TensorSpline& s, const AdmissibleSystem& sys1,
                 const AdmissibleSystem& sys2) {
    const int n1 = s.odo1().order;
    const int n2 = s.odo2().order;
    double total = 0.0;
    {
        std::vector<Dirac2D> full;
        for (const auto& a : s.atoms())
            if (a.family == AtomFamily::TensorGreen) full.push_back({a.x1, a.x2, a.weight});
        total += merged_mass_2d(std::move(full));
    }
    std::vector<std::vector<Dirac1D>> m1(static_cast<std::size_t>(n1));
    std::vector<std::vector<Dirac1D>> m2(static_cast<std::size_t>(n2));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n1, n2);
    for (const auto& a : s.atoms()) {
        switch (a.family) {
            case AtomFamily::TensorGreen: {
                const auto c1 = sys1.project_green(a.x1);
                const auto c2 = sys2.project_green(a.x2);
                for (int n = 0; n < n1; ++n)
                    if (c1[std::size_t(n)] != 0.0)
                        m1[std::size_t(n)].push_back({a.x2, a.weight * c1[std::size_t(n)]});
                for (int n = 0; n < n2; ++n)
                    if (c2[std::size_t(n)] != 0.0)
                        m2[std::size_t(n)].push_back({a.x1, a.weight * c2[std::size_t(n)]});
                for (int i = 0; i < n1; ++i)
                    for (int j = 0; j < n2; ++j)
                        d(i, j) += a.weight * c1[std::size_t(i)] * c2[std::size_t(j)];
                break;
            }
            case AtomFamily::PolyGreen: {
                m1[std::size_t(a.n1) - 1].push_back({a.x2, a.weight});
                const auto c2 = sys2.project_green(a.x2);
                for (int j = 0; j < n2; ++j) d(a.n1 - 1, j) += a.weight * c2[std::size_t(j)];
                break;
            }
            case AtomFamily::GreenPoly: {
                m2[std::size_t(a.n2) - 1].push_back({a.x1, a.weight});
                const auto c1 = sys1.project_green(a.x1);
                for (int i = 0; i < n1; ++i) d(i, a.n2 - 1) += a.weight * c1[std::size_t(i)];
                break;
            }
            case AtomFamily::PolyPoly:
                d(a.n1 - 1, a.n2 - 1) += a.weight;
                break;
        }
    }
    for (auto& list : m1) total += merged_mass(std::move(list));
    for (auto& list : m2) total += merged_mass(std::move(list));
    total += d.cwiseAbs().sum();
    return total;
}

PiecewisePolyExp section(const TensorSpline& s, int axis, double fixed_coordinate) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("section: axis must be 1 or 2");
    PiecewisePolyExp acc;
    for (const auto& a : s.atoms()) {
        const int other = (axis == 1) ? 2 : 1;
        double other_value;
        {
            const bool first = (other == 1);
            const Odo& odo = first ? s.odo1() : s.odo2();
            const double anchor = first ? s.domain().k1.lo : s.domain().k2.lo;
            const bool green_profile = (a.family == AtomFamily::TensorGreen) ||
                                       (first ? a.family == AtomFamily::GreenPoly
                                              : a.family == AtomFamily::PolyGreen);
            if (green_profile)
                other_value = green_eval(odo, fixed_coordinate - (first ? a.x1 : a.x2));
            else
                other_value = nullspace_eval(odo, first ? a.n1 : a.n2, anchor, fixed_coordinate);
        }
        if (other_value == 0.0 || a.weight == 0.0) continue;
        acc = acc + axis_profile(s, a, axis).scaled(a.weight * other_value);
    }
    return acc;
}

}  // namespace tps
