#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tps/multidim.hpp"
#include "tps/rng.hpp"
#include "tps/solver.hpp"

namespace tps {

struct SimulateParams {
    int tensor_atoms = 10;
    int poly_green_atoms = 5;
    int green_poly_atoms = 5;
    double weight_scale = 1.0;
};

/// Parsed form of the single structured problem/result file. The canonical
/// serialization is JSON with a fixed key order, so identical documents are
/// byte-identical and diffable.
struct ProblemDocument {
    int schema_version = 1;
    std::string mode = "tensor2d";  // "tensor2d" | "multidim"

    // tensor2d operators and domain
    Odo odo1{0.0, 1}, odo2{0.0, 1};
    Rect domain{Interval{0.0, 1.0}, Interval{0.0, 1.0}};
    std::string system_kind = "fundamental";
    std::vector<MeasurementFunctional> functionals;

    // multidim operators ([0,1]^D implied)
    int dimension = 2;
    int order = 1;
    std::vector<MultiFunctional> multi_functionals;

    double lambda = 0.1;
    int grid_n2d = 33, grid_n1d = 65, grid_refinements = 3;
    int multi_grid_n1d = 17, multi_grid_refinements = 2;
    double tol = 1e-8;
    long max_iterations = 200000;
    std::uint64_t seed = 0;
    std::string fidelity = "quadratic";
    double noise_sigma = 0.0;

    std::optional<SimulateParams> simulate_params;
    std::optional<std::vector<TensorAtom>> ground_truth;
    std::optional<MultiSpline> multi_ground_truth;
    std::optional<std::vector<double>> y;

    // result fields (present after solving)
    std::optional<std::vector<TensorAtom>> solution;
    std::optional<MultiSpline> multi_solution;
    std::optional<double> objective;
    std::optional<double> duality_gap;
    std::optional<long> iterations;
    std::optional<std::string> certification_text;
    std::optional<bool> certified;

    static ProblemDocument parse(const std::string& text);
    static ProblemDocument read_file(const std::string& path);
    std::string write() const;
    void write_file(const std::string& path) const;

    Problem to_problem() const;          // tensor2d
    MultiProblem to_multi_problem() const;
    GridSpec to_grid() const;
    MultiGrid to_multi_grid() const;
    TensorSpline ground_truth_spline() const;
    TensorSpline solution_spline() const;
};

/// Random spline in the style of the paper's illustration: uniformly placed
/// knots, signed weights in [0.25, 1.25] * scale, small regression block.
std::vector<TensorAtom> random_spline_atoms(const SimulateParams& params, const Rect& domain,
                                            const Odo& odo1, const Odo& odo2, Rng& rng);

/// Fills y = measurements of the ground truth plus sigma * N(0,1) noise.
/// Generates a random ground truth from simulate_params when none is present.
void simulate_document(ProblemDocument& doc, std::optional<std::uint64_t> seed_override);

struct SolveStatus {
    bool certified = false;
    std::string summary;
};

/// Runs the full pipeline and stores the solution in the document. Throws
/// AssumptionError / NoConvergenceError; a failed certification is reported in
/// the return value, not thrown.
SolveStatus solve_document(ProblemDocument& doc, std::optional<std::uint64_t> seed_override,
                           std::optional<double> tol_override,
                           std::optional<std::pair<int, int>> grid_override);

/// Atom table as CSV (header: family,n,n',weight,x1,x2), 17 significant digits.
std::string atoms_csv(const std::vector<TensorAtom>& atoms);

/// printf("%.17g") helper used for all report output.
std::string fmt17(double v);

}  // namespace tps
