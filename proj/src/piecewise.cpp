#include "tps/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tps/errors.hpp"

namespace tps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double eval_poly(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
    return v;
}

/// Taylor shift: returns q with q(s) = p(s + delta).
std::vector<double> shift_poly(const std::vector<double>& p, double delta) {
    if (delta == 0.0) return p;
    const std::size_t n = p.size();
    std::vector<double> q(n, 0.0);
    std::vector<double> binom(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        binom[0] = 1.0;
        for (std::size_t j = 1; j <= i; ++j) binom[j] = binom[j - 1] * double(i - j + 1) / double(j);
        // coefficient of s^j in (s + delta)^i is C(i, j) delta^{i-j}
        for (std::size_t j = 0; j <= i; ++j)
            q[j] += p[i] * binom[j] * std::pow(delta, double(i - j));
    }
    return q;
}

std::vector<double> mul_poly(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

void trim_poly(std::vector<double>& c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
}

/// Re-centers a term list from `origin` to `new_origin`.
std::vector<ExpPolyTerm> recenter_terms(const std::vector<ExpPolyTerm>& terms, double origin,
                                        double new_origin) {
    if (origin == new_origin) return terms;
    // s = t - origin and s' = t - new_origin, so s = s' + (new_origin - origin)
    const double delta = new_origin - origin;
    std::vector<ExpPolyTerm> out;
    out.reserve(terms.size());
    for (const auto& term : terms) {
        ExpPolyTerm t;
        t.rate = term.rate;
        t.coeffs = shift_poly(term.coeffs, delta);
        const double scale = std::exp(term.rate * delta);
        for (double& c : t.coeffs) c *= scale;
        trim_poly(t.coeffs);
        if (!t.coeffs.empty()) out.push_back(std::move(t));
    }
    return out;
}

void append_terms(std::vector<ExpPolyTerm>& dst, const std::vector<ExpPolyTerm>& src) {
    for (const auto& term : src) {
        bool merged = false;
        for (auto& existing : dst) {
            if (existing.rate == term.rate) {
                if (existing.coeffs.size() < term.coeffs.size())
                    existing.coeffs.resize(term.coeffs.size(), 0.0);
                for (std::size_t i = 0; i < term.coeffs.size(); ++i)
                    existing.coeffs[i] += term.coeffs[i];
                merged = true;
                break;
            }
        }
        if (!merged) dst.push_back(term);
    }
}

void prune_terms(std::vector<ExpPolyTerm>& terms) {
    for (auto& t : terms) trim_poly(t.coeffs);
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const ExpPolyTerm& t) { return t.coeffs.empty(); }),
                terms.end());
}

double probe_point(double lo, double hi) {
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (std::isfinite(lo)) return lo + 1.0;
    if (std::isfinite(hi)) return hi - 1.0;
    return 0.0;
}

/// ∫_0^w u^k e^{ru} du for k = 0..kmax, assuming w >= 0, r != 0. The upward
/// recurrence J_k = (w^k e^{rw} - k J_{k-1})/r amplifies errors by roughly
/// k!/(rw)^k, so it is only safe when |rw| dominates the degree; elsewhere the
/// series in rw is used.
std::vector<double> moments_exp(double rate, double w, int kmax) {
    std::vector<double> j(std::size_t(kmax) + 1, 0.0);
    const double rw = rate * w;
    if (std::abs(rw) < double(kmax) + 8.0) {
        // J_k = w^{k+1} sum_m (rw)^m / (m! (k+m+1))
        for (int k = 0; k <= kmax; ++k) {
            double sum = 1.0 / double(k + 1);
            double pow_rw = 1.0;
            for (int m = 1; m < 120; ++m) {
                pow_rw *= rw / double(m);
                const double term = pow_rw / double(k + m + 1);
                sum += term;
                if (std::abs(term) <= 1e-18 * std::abs(sum) && m > std::abs(rw)) break;
            }
            j[std::size_t(k)] = std::pow(w, double(k + 1)) * sum;
        }
    } else {
        j[0] = std::expm1(rw) / rate;
        double wk = 1.0;
        const double ew = std::exp(rw);
        for (int k = 1; k <= kmax; ++k) {
            wk *= w;
            j[std::size_t(k)] = (wk * ew - double(k) * j[std::size_t(k) - 1]) / rate;
        }
    }
    return j;
}

}  // namespace

void validate_interval(const Interval& k, const char* what) {
    if (!(k.lo < k.hi) || !std::isfinite(k.lo) || !std::isfinite(k.hi))
        throw std::invalid_argument(std::string(what) + ": interval requires finite lo < hi");
}

double PpePiece::eval_local(double s) const {
    double v = 0.0;
    for (const auto& t : terms) v += eval_poly(t.coeffs, s) * std::exp(t.rate * s);
    return v;
}

double exp_poly_integral(const std::vector<double>& coeffs, double rate, double s0, double s1) {
    if (!(s1 > s0) || coeffs.empty()) return 0.0;
    if (rate == 0.0) {
        // plain antiderivative sum_k c_k s^{k+1}/(k+1)
        double total = 0.0;
        double pw0 = 1.0, pw1 = 1.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            pw0 *= s0;
            pw1 *= s1;
            total += coeffs[k] * (pw1 - pw0) / double(k + 1);
        }
        return total;
    }
    // substitute u = s - s0: exp(r s0) * ∫_0^w P(s0 + u) e^{ru} du
    const double w = s1 - s0;
    const std::vector<double> q = shift_poly(coeffs, s0);
    const std::vector<double> j = moments_exp(rate, w, int(q.size()) - 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) acc += q[k] * j[k];
    return std::exp(rate * s0) * acc;
}

PiecewisePolyExp PiecewisePolyExp::exp_poly(std::vector<double> coeffs, double rate,
                                            double origin) {
    return exp_poly_on(Interval{-kInf, kInf}, std::move(coeffs), rate, origin);
}

PiecewisePolyExp PiecewisePolyExp::exp_poly_on(Interval support, std::vector<double> coeffs,
                                               double rate, double origin) {
    trim_poly(coeffs);
    PiecewisePolyExp f;
    if (coeffs.empty() || !(support.lo < support.hi)) return f;
    PpePiece piece;
    piece.lo = support.lo;
    piece.hi = support.hi;
    piece.origin = std::isfinite(origin) ? origin : 0.0;
    piece.terms.push_back(ExpPolyTerm{rate, std::move(coeffs)});
    f.pieces_.push_back(std::move(piece));
    return f;
}

PiecewisePolyExp PiecewisePolyExp::constant(double value) {
    return exp_poly({value}, 0.0, 0.0);
}

PiecewisePolyExp PiecewisePolyExp::bump(Interval support, int order) {
    validate_interval(support, "bump");
    if (order < 1) throw std::invalid_argument("bump: order must be >= 1");
    // (t-a)^k (b-t)^k around origin a: s^k (W - s)^k with W = b - a
    const double width = support.hi - support.lo;
    std::vector<double> left(std::size_t(order) + 1, 0.0);
    left[std::size_t(order)] = 1.0;  // s^k
    std::vector<double> right;       // (W - s)^k
    right.assign(2, 0.0);
    right[0] = width;
    right[1] = -1.0;
    std::vector<double> rk = {1.0};
    for (int i = 0; i < order; ++i) rk = mul_poly(rk, right);
    return exp_poly_on(support, mul_poly(left, rk), 0.0, support.lo);
}

PiecewisePolyExp PiecewisePolyExp::from_pieces(std::vector<PpePiece> pieces) {
    for (auto& p : pieces) prune_terms(p.terms);
    pieces.erase(std::remove_if(pieces.begin(), pieces.end(),
                                [](const PpePiece& p) {
                                    return p.terms.empty() || !(p.lo < p.hi);
                                }),
                 pieces.end());
    std::sort(pieces.begin(), pieces.end(),
              [](const PpePiece& a, const PpePiece& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].lo < pieces[i - 1].hi)
            throw Error("PiecewisePolyExp: overlapping pieces");
    }
    PiecewisePolyExp f;
    f.pieces_ = std::move(pieces);
    return f;
}

double PiecewisePolyExp::eval(double t) const {
    for (const auto& p : pieces_) {
        if (p.lo <= t && t < p.hi) return p.eval_local(t - p.origin);
        if (p.lo > t) break;
    }
    return 0.0;
}

double PiecewisePolyExp::eval_left(double t) const {
    for (const auto& p : pieces_) {
        if (p.lo < t && t <= p.hi) return p.eval_local(t - p.origin);
        if (p.lo >= t) break;
    }
    return 0.0;
}

PiecewisePolyExp PiecewisePolyExp::derivative() const {
    PiecewisePolyExp out;
    out.pieces_.reserve(pieces_.size());
    for (const auto& p : pieces_) {
        PpePiece d;
        d.lo = p.lo;
        d.hi = p.hi;
        d.origin = p.origin;
        for (const auto& term : p.terms) {
            // d/ds [P(s) e^{rs}] = (P' + r P)(s) e^{rs}
            ExpPolyTerm t;
            t.rate = term.rate;
            t.coeffs.assign(term.coeffs.size(), 0.0);
            for (std::size_t k = 1; k < term.coeffs.size(); ++k)
                t.coeffs[k - 1] += double(k) * term.coeffs[k];
            if (term.rate != 0.0)
                for (std::size_t k = 0; k < term.coeffs.size(); ++k)
                    t.coeffs[k] += term.rate * term.coeffs[k];
            trim_poly(t.coeffs);
            if (!t.coeffs.empty()) d.terms.push_back(std::move(t));
        }
        if (!d.terms.empty()) out.pieces_.push_back(std::move(d));
    }
    return out;
}

PiecewisePolyExp PiecewisePolyExp::derivative(int times) const {
    PiecewisePolyExp f = *this;
    for (int i = 0; i < times; ++i) f = f.derivative();
    return f;
}

double PiecewisePolyExp::integrate(double a, double b) const {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    for (const auto& p : pieces_) {
        const double lo = std::max(p.lo, a);
        const double hi = std::min(p.hi, b);
        if (!(hi > lo)) continue;
        for (const auto& term : p.terms)
            total += exp_poly_integral(term.coeffs, term.rate, lo - p.origin, hi - p.origin);
    }
    return total;
}

PiecewisePolyExp PiecewisePolyExp::scaled(double c) const {
    if (c == 0.0) return {};
    PiecewisePolyExp out = *this;
    for (auto& p : out.pieces_)
        for (auto& t : p.terms)
            for (double& v : t.coeffs) v *= c;
    return out;
}

PiecewisePolyExp PiecewisePolyExp::shifted(double delta) const {
    PiecewisePolyExp out = *this;
    for (auto& p : out.pieces_) {
        p.lo += delta;
        p.hi += delta;
        p.origin += delta;
    }
    return out;
}

PiecewisePolyExp PiecewisePolyExp::restricted(Interval window) const {
    PiecewisePolyExp out;
    for (const auto& p : pieces_) {
        const double lo = std::max(p.lo, window.lo);
        const double hi = std::min(p.hi, window.hi);
        if (!(hi > lo)) continue;
        PpePiece q = p;
        q.lo = lo;
        q.hi = hi;
        out.pieces_.push_back(std::move(q));
    }
    return out;
}

PiecewisePolyExp PiecewisePolyExp::operator+(const PiecewisePolyExp& other) const {
    if (pieces_.empty()) return other;
    if (other.pieces_.empty()) return *this;
    std::vector<double> cuts;
    double glo = kInf, ghi = -kInf;
    for (const auto* f : {this, &other}) {
        for (const auto& p : f->pieces_) {
            if (std::isfinite(p.lo)) cuts.push_back(p.lo); else glo = -kInf;
            if (std::isfinite(p.hi)) cuts.push_back(p.hi); else ghi = kInf;
            glo = std::min(glo, p.lo);
            ghi = std::max(ghi, p.hi);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> edges;
    if (glo == -kInf) edges.push_back(-kInf);
    for (double c : cuts) edges.push_back(c);
    if (ghi == kInf) edges.push_back(kInf);
    PiecewisePolyExp out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        if (!(lo < hi)) continue;
        const double probe = probe_point(lo, hi);
        PpePiece piece;
        piece.lo = lo;
        piece.hi = hi;
        piece.origin = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
        for (const auto* f : {this, &other}) {
            for (const auto& p : f->pieces_) {
                if (p.lo <= probe && probe < p.hi) {
                    append_terms(piece.terms, recenter_terms(p.terms, p.origin, piece.origin));
                    break;
                }
            }
        }
        prune_terms(piece.terms);
        if (!piece.terms.empty()) out.pieces_.push_back(std::move(piece));
    }
    return out;
}

PiecewisePolyExp PiecewisePolyExp::operator-(const PiecewisePolyExp& other) const {
    return *this + other.scaled(-1.0);
}

PiecewisePolyExp PiecewisePolyExp::operator*(const PiecewisePolyExp& other) const {
    PiecewisePolyExp out;
    for (const auto& a : pieces_) {
        for (const auto& b : other.pieces_) {
            const double lo = std::max(a.lo, b.lo);
            const double hi = std::min(a.hi, b.hi);
            if (!(lo < hi)) continue;
            PpePiece piece;
            piece.lo = lo;
            piece.hi = hi;
            piece.origin = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
            const auto ta = recenter_terms(a.terms, a.origin, piece.origin);
            const auto tb = recenter_terms(b.terms, b.origin, piece.origin);
            for (const auto& u : ta) {
                for (const auto& v : tb) {
                    ExpPolyTerm t;
                    t.rate = u.rate + v.rate;
                    t.coeffs = mul_poly(u.coeffs, v.coeffs);
                    append_terms(piece.terms, {t});
                }
            }
            prune_terms(piece.terms);
            if (!piece.terms.empty()) out.pieces_.push_back(std::move(piece));
        }
    }
    std::sort(out.pieces_.begin(), out.pieces_.end(),
              [](const PpePiece& x, const PpePiece& y) { return x.lo < y.lo; });
    return out;
}

std::optional<Interval> PiecewisePolyExp::support() const {
    if (pieces_.empty()) return std::nullopt;
    double lo = kInf, hi = -kInf;
    for (const auto& p : pieces_) {
        lo = std::min(lo, p.lo);
        hi = std::max(hi, p.hi);
    }
    return Interval{lo, hi};
}

double inner_product(const PiecewisePolyExp& f, const PiecewisePolyExp& g) {
    const PiecewisePolyExp prod = f * g;
    const auto supp = prod.support();
    if (!supp) return 0.0;
    if (!std::isfinite(supp->lo) || !std::isfinite(supp->hi))
        throw Error("inner_product: unbounded overlap");
    return prod.integrate(supp->lo, supp->hi);
}

}  // namespace tps
