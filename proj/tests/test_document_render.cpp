#include <doctest.h>

#include <cmath>

#include "tps/document.hpp"
#include "tps/errors.hpp"
#include "tps/render.hpp"

using namespace tps;

namespace {

const char* kSampleDoc = R"({
  "schema_version": 1,
  "mode": "tensor2d",
  "operators": {"alpha1": 0.0, "order1": 1, "alpha2": 0.0, "order2": 1},
  "domain": {"k1": [0.0, 1.0], "k2": [0.0, 1.0]},
  "system": "fundamental",
  "functionals": [
    {"type": "box", "rect": [0.0, 0.5, 0.0, 0.5]},
    {"type": "box", "rect": [0.25, 0.9, 0.1, 0.8]},
    {"type": "box", "rect": [0.4, 1.0, 0.3, 1.0]},
    {"type": "box", "rect": [0.1, 0.7, 0.45, 0.95]}
  ],
  "lambda": 0.02,
  "grid": {"n2d": 9, "n1d": 9, "refinements": 1},
  "solver": {"tol": 1e-8, "max_iterations": 200000},
  "seed": 11,
  "noise_sigma": 0.0,
  "simulate": {"tensor_atoms": 3, "poly_green_atoms": 1, "green_poly_atoms": 1,
               "weight_scale": 1.0}
})";

}  // namespace

TEST_CASE("document round trip is canonical") {
    const auto doc = ProblemDocument::parse(kSampleDoc);
    const std::string once = doc.write();
    const auto again = ProblemDocument::parse(once);
    CHECK(again.write() == once);
    CHECK(again.functionals.size() == 4);
    CHECK(again.lambda == 0.02);
    CHECK(again.seed == 11);
}

TEST_CASE("simulate is deterministic and respects sigma = 0") {
    auto doc1 = ProblemDocument::parse(kSampleDoc);
    auto doc2 = ProblemDocument::parse(kSampleDoc);
    simulate_document(doc1, std::nullopt);
    simulate_document(doc2, std::nullopt);
    REQUIRE(doc1.y.has_value());
    CHECK(doc1.write() == doc2.write());
    // sigma = 0: y equals the exact measurements of the generated truth
    const TensorSpline truth = doc1.ground_truth_spline();
    for (std::size_t i = 0; i < doc1.functionals.size(); ++i)
        CHECK((*doc1.y)[i] == measure(truth, doc1.functionals[i]));
    SUBCASE("different seed changes the data") {
        auto doc3 = ProblemDocument::parse(kSampleDoc);
        simulate_document(doc3, 999);
        CHECK(doc3.write() != doc1.write());
    }
    SUBCASE("fig-1 style atom counts") {
        auto doc = ProblemDocument::parse(kSampleDoc);
        doc.simulate_params = SimulateParams{10, 5, 5, 1.0};
        simulate_document(doc, std::nullopt);
        int tg = 0, pg = 0, gp = 0;
        for (const auto& a : *doc.ground_truth) {
            tg += a.family == AtomFamily::TensorGreen;
            pg += a.family == AtomFamily::PolyGreen;
            gp += a.family == AtomFamily::GreenPoly;
        }
        CHECK(tg == 10);
        CHECK(pg == 5);
        CHECK(gp == 5);
    }
}

TEST_CASE("solve_document runs the pipeline and records certification") {
    auto doc = ProblemDocument::parse(kSampleDoc);
    simulate_document(doc, std::nullopt);
    const auto status = solve_document(doc, std::nullopt, std::nullopt, std::nullopt);
    CHECK(status.certified);
    REQUIRE(doc.solution.has_value());
    CHECK(doc.objective.has_value());
    CHECK(*doc.duality_gap <= doc.tol);
    // result document round-trips
    const auto reparsed = ProblemDocument::parse(doc.write());
    CHECK(reparsed.write() == doc.write());
    SUBCASE("atom csv has the fixed header and one row per atom") {
        const std::string csv = atoms_csv(*doc.solution);
        CHECK(csv.rfind("family,n,n',weight,x1,x2\n", 0) == 0);
        const auto rows = std::count(csv.begin(), csv.end(), '\n');
        CHECK(std::size_t(rows) == doc.solution->size() + 1);
    }
}

TEST_CASE("inadmissible documents raise typed errors") {
    auto doc = ProblemDocument::parse(kSampleDoc);
    doc.functionals[0] = MeasurementFunctional::dirac(0.5, 0.5);  // order-1 axes
    // simulate measures the truth, so the gate already fires there
    CHECK_THROWS_AS(simulate_document(doc, std::nullopt), AssumptionError);
    // and a doctored document with data still cannot reach the solver
    auto doc2 = ProblemDocument::parse(kSampleDoc);
    simulate_document(doc2, std::nullopt);
    doc2.functionals[0] = MeasurementFunctional::dirac(0.5, 0.5);
    CHECK_THROWS_AS(solve_document(doc2, std::nullopt, std::nullopt, std::nullopt),
                    AssumptionError);
}

TEST_CASE("rendering is deterministic and structured") {
    auto doc = ProblemDocument::parse(kSampleDoc);
    simulate_document(doc, std::nullopt);
    RenderOptions opt;
    opt.raster = 32;
    const auto files = render_document(doc, opt);
    REQUIRE(files.count("spline.svg") == 1);
    REQUIRE(files.count("decomposition.svg") == 1);
    const auto files2 = render_document(doc, opt);
    CHECK(files.at("spline.svg") == files2.at("spline.svg"));
    CHECK(files.at("decomposition.svg") == files2.at("decomposition.svg"));
    const std::string& svg = files.at("spline.svg");
    CHECK(svg.find("<svg xmlns=") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);  // dotted boundary
    CHECK(svg.find("knot-tensor") != std::string::npos);       // corner markers

    SUBCASE("empty spline renders a blank heatmap with the boundary square") {
        auto blank = ProblemDocument::parse(kSampleDoc);
        blank.ground_truth = std::vector<TensorAtom>{};
        const auto out = render_document(blank, opt);
        CHECK(out.at("spline.svg").find("stroke-dasharray") != std::string::npos);
        CHECK(out.at("spline.svg").find("knot-tensor") == std::string::npos);
    }
}

TEST_CASE("decomposition panels re-sum to the full raster") {
    auto doc = ProblemDocument::parse(kSampleDoc);
    simulate_document(doc, std::nullopt);
    const TensorSpline s = doc.ground_truth_spline();
    RenderOptions opt;
    opt.raster = 24;
    const auto full = raster_values(s, opt);
    const auto parts = decompose(s);
    std::vector<double> sum(full.size(), 0.0);
    for (const auto& p : parts) {
        const auto values = raster_values(p, opt);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += values[i];
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i)
        worst = std::max(worst, std::abs(sum[i] - full[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("multidim document round trip") {
    ProblemDocument doc;
    doc.mode = "multidim";
    doc.dimension = 3;
    doc.order = 1;
    doc.multi_functionals.push_back(MultiFunctional::box(
        {Interval{0.0, 0.5}, Interval{0.2, 0.8}, Interval{0.1, 0.9}}));
    MultiSpline truth;
    truth.dimension = 3;
    truth.order = 1;
    truth.null_component = {0.25};
    MultiAtom atom;
    atom.weight = 1.0;
    atom.factors = {MultiFactor{true, 0, 0.25}, MultiFactor{true, 0, 0.5},
                    MultiFactor{false, 0, 0.0}};
    truth.atoms.push_back(atom);
    doc.multi_ground_truth = truth;
    const std::string text = doc.write();
    const auto parsed = ProblemDocument::parse(text);
    CHECK(parsed.write() == text);
    CHECK(parsed.multi_ground_truth->atoms.size() == 1);
}
