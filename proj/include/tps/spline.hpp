#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "tps/system.hpp"

namespace tps {

struct Rect {
    Interval k1;
    Interval k2;
    bool contains(double t1, double t2) const { return k1.contains(t1) && k2.contains(t2); }
};

enum class AtomFamily { TensorGreen, PolyGreen, GreenPoly, PolyPoly };

const char* family_name(AtomFamily f);
AtomFamily family_from_name(const std::string& name);

/// One term of the four-family spline expansion. Field use per family:
///   TensorGreen: weight, knot (x1, x2)
///   PolyGreen:   n1 (null index on axis 1), weight, knot x2
///   GreenPoly:   n2 (null index on axis 2), weight, knot x1
///   PolyPoly:    n1, n2, weight
struct TensorAtom {
    AtomFamily family = AtomFamily::TensorGreen;
    int n1 = 0;
    int n2 = 0;
    double weight = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

struct Dirac1D {
    double x = 0.0;
    double w = 0.0;
};
struct Dirac2D {
    double x1 = 0.0;
    double x2 = 0.0;
    double w = 0.0;
};

/// Discrete innovation of a spline under the three operator pairs.
struct InnovationTriple {
    std::vector<Dirac2D> full2d;                 // [L1 (x) L2] f
    std::vector<std::vector<Dirac1D>> per_null1; // [proj (x) L2] f, one list per n <= N1
    std::vector<std::vector<Dirac1D>> per_null2; // [L1 (x) proj] f, one list per n' <= N2
    Eigen::MatrixXd null_matrix;                 // N1 x N2 coefficients of the regression block
};

enum class SeminormVariant { Causal, Acausal };
enum class TensorOp { L1L2, ProjL2, L1Proj };

/// Compactly supported piecewise-polynomial test function together with the
/// largest operator order it can absorb without creating boundary Diracs.
struct TestFunction {
    PiecewisePolyExp f;
    int order_limit = 0;

    /// scale * (t-a)^k (b-t)^k; safe for operators of order <= k.
    static TestFunction bump(Interval support, int order, double scale = 1.0);
};

/// Finite-atom tensor-product spline over a rectangle, carrying the pair of
/// fundamental systems of its domain (which fixes the null-space bases).
class TensorSpline {
public:
    TensorSpline(const Odo& odo1, const Odo& odo2, const Rect& domain,
                 std::vector<TensorAtom> atoms);

    const Odo& odo1() const { return odo1_; }
    const Odo& odo2() const { return odo2_; }
    const Rect& domain() const { return domain_; }
    const std::vector<TensorAtom>& atoms() const { return atoms_; }
    const AdmissibleSystem& system1() const { return *sys1_; }
    const AdmissibleSystem& system2() const { return *sys2_; }

    TensorSpline with_atoms(std::vector<TensorAtom> atoms) const;

    /// Number of penalized atoms (PolyPoly excluded).
    int sparsity_count() const;

private:
    Odo odo1_, odo2_;
    Rect domain_;
    std::vector<TensorAtom> atoms_;
    SystemPtr sys1_, sys2_;
};

double eval(const TensorSpline& s, double t1, double t2);

InnovationTriple innovation(const TensorSpline& s);

/// <Op{f}, psi1 (x) psi2> computed by moving the adjoints onto the test pair
/// and integrating the atom profiles in closed form. Must match
/// innovation_pairing; that agreement is the module's central cross-check.
double weak_action(const TensorSpline& s, const TestFunction& psi1, const TestFunction& psi2,
                   TensorOp op);

/// The discrete side of the same pairing, evaluated from the innovation.
double innovation_pairing(const InnovationTriple& triple, const TensorSpline& s,
                          const TestFunction& psi1, const TestFunction& psi2, TensorOp op);

double seminorm(const TensorSpline& s, SeminormVariant variant = SeminormVariant::Causal);

/// Rewrites lower-edge knots as null-space atoms, drops upper-edge atoms,
/// merges duplicates. Equal to the input on the open rectangle; never
/// increases the seminorm. Idempotent.
TensorSpline canonicalize(const TensorSpline& s);

bool is_canonical(const TensorSpline& s);

/// Direct-sum split into the four atom families (same domain and operators).
std::array<TensorSpline, 4> decompose(const TensorSpline& s);

struct RegularityReport {
    bool bounded = false;
    double max_abs = 0.0;
};

/// Finite-difference probe of the mixed partial (d1, d2) on a 64x64 grid over
/// sample_box, dodging knot lines. Throws OrderTooHighError when d1 >= N1 or
/// d2 >= N2.
RegularityReport regularity_probe(const TensorSpline& s, int d1, int d2, const Rect& sample_box);

/// Full native-space norm of the spline under an arbitrary admissible system
/// pair sharing the spline's null-space bases (seminorm terms plus the l1 norm
/// of the regression block as seen by that system).
double full_norm(const TensorSpline& s, const AdmissibleSystem& sys1,
                 const AdmissibleSystem& sys2);

/// 1D section along `axis` with the other coordinate fixed.
PiecewisePolyExp section(const TensorSpline& s, int axis, double fixed_coordinate);

}  // namespace tps
