#include "tps/document.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tps/errors.hpp"

namespace tps {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json atom_to_json(const TensorAtom& a) {
    ordered_json j;
    j["family"] = family_name(a.family);
    j["n"] = a.n1;
    j["np"] = a.n2;
    j["weight"] = a.weight;
    j["x1"] = a.x1;
    j["x2"] = a.x2;
    return j;
}

TensorAtom atom_from_json(const ordered_json& j) {
    TensorAtom a;
    a.family = family_from_name(j.at("family").get<std::string>());
    a.n1 = j.value("n", 0);
    a.n2 = j.value("np", 0);
    a.weight = j.at("weight").get<double>();
    a.x1 = j.value("x1", 0.0);
    a.x2 = j.value("x2", 0.0);
    return a;
}

ordered_json ppe_profile_to_json(const PiecewisePolyExp& f) {
    // profiles are restricted to documents as single-piece polynomials
    ordered_json j;
    const auto& pieces = f.pieces();
    if (pieces.size() != 1 || pieces[0].terms.size() != 1 || pieces[0].terms[0].rate != 0.0)
        throw DocumentError("only single-piece polynomial profiles are serializable");
    j["support"] = {pieces[0].lo, pieces[0].hi};
    j["origin"] = pieces[0].origin;
    j["poly"] = pieces[0].terms[0].coeffs;
    return j;
}

PiecewisePolyExp ppe_profile_from_json(const ordered_json& j) {
    const auto support = j.at("support");
    const Interval k{support.at(0).get<double>(), support.at(1).get<double>()};
    validate_interval(k, "profile support");
    std::vector<double> coeffs = j.value("poly", std::vector<double>{1.0});
    const double origin = j.value("origin", k.lo);
    return PiecewisePolyExp::exp_poly_on(k, std::move(coeffs), 0.0, origin);
}

ordered_json functional_to_json(const MeasurementFunctional& fn) {
    ordered_json j;
    switch (fn.kind) {
        case MeasurementFunctional::Kind::DiracSample:
            j["type"] = "dirac";
            j["point"] = {fn.t1, fn.t2};
            break;
        case MeasurementFunctional::Kind::SeparableBox:
        case MeasurementFunctional::Kind::SeparableProfile:
            j["type"] = "profile";
            j["f1"] = ppe_profile_to_json(fn.f1);
            j["f2"] = ppe_profile_to_json(fn.f2);
            break;
    }
    return j;
}

MeasurementFunctional functional_from_json(const ordered_json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirac") {
        const auto p = j.at("point");
        return MeasurementFunctional::dirac(p.at(0).get<double>(), p.at(1).get<double>());
    }
    if (type == "box") {
        const auto r = j.at("rect");
        const Rect rect{Interval{r.at(0).get<double>(), r.at(1).get<double>()},
                        Interval{r.at(2).get<double>(), r.at(3).get<double>()}};
        if (j.contains("weight1") || j.contains("weight2")) {
            const PiecewisePolyExp w1 = j.contains("weight1")
                                            ? ppe_profile_from_json(j.at("weight1"))
                                            : PiecewisePolyExp::constant(1.0);
            const PiecewisePolyExp w2 = j.contains("weight2")
                                            ? ppe_profile_from_json(j.at("weight2"))
                                            : PiecewisePolyExp::constant(1.0);
            return MeasurementFunctional::box(rect, w1, w2);
        }
        return MeasurementFunctional::box(rect);
    }
    if (type == "profile")
        return MeasurementFunctional::profile(ppe_profile_from_json(j.at("f1")),
                                              ppe_profile_from_json(j.at("f2")));
    throw DocumentError("unknown functional type: " + type);
}

ordered_json multi_functional_to_json(const MultiFunctional& fn) {
    ordered_json j;
    if (fn.is_dirac) {
        j["type"] = "dirac";
        j["point"] = fn.point;
    } else {
        j["type"] = "box";
        ordered_json rects = ordered_json::array();
        for (const auto& p : fn.profiles) {
            const auto s = p.support();
            rects.push_back({s->lo, s->hi});
        }
        j["rects"] = rects;
    }
    return j;
}

MultiFunctional multi_functional_from_json(const ordered_json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirac") return MultiFunctional::dirac(j.at("point").get<std::vector<double>>());
    if (type == "box") {
        std::vector<Interval> rects;
        for (const auto& r : j.at("rects"))
            rects.push_back(Interval{r.at(0).get<double>(), r.at(1).get<double>()});
        return MultiFunctional::box(rects);
    }
    throw DocumentError("unknown multidim functional type: " + type);
}

ordered_json multi_spline_to_json(const MultiSpline& s) {
    ordered_json j;
    j["dimension"] = s.dimension;
    j["order"] = s.order;
    ordered_json atoms = ordered_json::array();
    for (const auto& a : s.atoms) {
        ordered_json ja;
        ja["weight"] = a.weight;
        ordered_json factors = ordered_json::array();
        for (const auto& f : a.factors) {
            ordered_json jf;
            if (f.is_green) {
                jf["type"] = "green";
                jf["knot"] = f.knot;
            } else {
                jf["type"] = "poly";
                jf["degree"] = f.degree;
            }
            factors.push_back(jf);
        }
        ja["factors"] = factors;
        atoms.push_back(ja);
    }
    j["atoms"] = atoms;
    j["null_component"] = s.null_component;
    return j;
}

MultiSpline multi_spline_from_json(const ordered_json& j) {
    MultiSpline s;
    s.dimension = j.at("dimension").get<int>();
    s.order = j.at("order").get<int>();
    for (const auto& ja : j.value("atoms", ordered_json::array())) {
        MultiAtom a;
        a.weight = ja.at("weight").get<double>();
        for (const auto& jf : ja.at("factors")) {
            MultiFactor f;
            if (jf.at("type").get<std::string>() == "green") {
                f.is_green = true;
                f.knot = jf.at("knot").get<double>();
            } else {
                f.is_green = false;
                f.degree = jf.at("degree").get<int>();
            }
            a.factors.push_back(f);
        }
        s.atoms.push_back(std::move(a));
    }
    s.null_component = j.value("null_component", std::vector<double>{});
    return s;
}

}  // namespace

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ProblemDocument ProblemDocument::parse(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw DocumentError(std::string("document parse error: ") + e.what());
    }
    ProblemDocument doc;
    try {
        doc.schema_version = j.value("schema_version", 1);
        if (doc.schema_version != 1)
            throw DocumentError("unsupported schema_version " +
                                std::to_string(doc.schema_version));
        doc.mode = j.value("mode", std::string("tensor2d"));
        if (doc.mode == "tensor2d") {
            const auto ops = j.at("operators");
            doc.odo1 = Odo{ops.value("alpha1", 0.0), ops.at("order1").get<int>()};
            doc.odo2 = Odo{ops.value("alpha2", 0.0), ops.at("order2").get<int>()};
            const auto dom = j.at("domain");
            doc.domain = Rect{Interval{dom.at("k1").at(0).get<double>(),
                                       dom.at("k1").at(1).get<double>()},
                              Interval{dom.at("k2").at(0).get<double>(),
                                       dom.at("k2").at(1).get<double>()}};
            doc.system_kind = j.value("system", std::string("fundamental"));
            for (const auto& jf : j.value("functionals", ordered_json::array()))
                doc.functionals.push_back(functional_from_json(jf));
        } else if (doc.mode == "multidim") {
            doc.dimension = j.at("dimension").get<int>();
            doc.order = j.at("order").get<int>();
            for (const auto& jf : j.value("functionals", ordered_json::array()))
                doc.multi_functionals.push_back(multi_functional_from_json(jf));
        } else {
            throw DocumentError("unknown mode: " + doc.mode);
        }
        doc.lambda = j.value("lambda", 0.1);
        if (j.contains("grid")) {
            const auto g = j.at("grid");
            doc.grid_n2d = g.value("n2d", 33);
            doc.grid_n1d = g.value("n1d", 65);
            doc.grid_refinements = g.value("refinements", 3);
            doc.multi_grid_n1d = g.value("n1d_multi", 17);
            doc.multi_grid_refinements = g.value("refinements_multi", 2);
        }
        if (j.contains("solver")) {
            doc.tol = j.at("solver").value("tol", 1e-8);
            doc.max_iterations = j.at("solver").value("max_iterations", 200000L);
        }
        doc.seed = j.value("seed", std::uint64_t(0));
        doc.fidelity = j.value("fidelity", std::string("quadratic"));
        if (doc.fidelity != "quadratic")
            throw DocumentError("unsupported fidelity: " + doc.fidelity);
        doc.noise_sigma = j.value("noise_sigma", 0.0);
        if (j.contains("simulate")) {
            SimulateParams p;
            const auto s = j.at("simulate");
            p.tensor_atoms = s.value("tensor_atoms", 10);
            p.poly_green_atoms = s.value("poly_green_atoms", 5);
            p.green_poly_atoms = s.value("green_poly_atoms", 5);
            p.weight_scale = s.value("weight_scale", 1.0);
            doc.simulate_params = p;
        }
        if (j.contains("ground_truth")) {
            if (doc.mode == "tensor2d") {
                std::vector<TensorAtom> atoms;
                for (const auto& ja : j.at("ground_truth").at("atoms"))
                    atoms.push_back(atom_from_json(ja));
                doc.ground_truth = std::move(atoms);
            } else {
                doc.multi_ground_truth = multi_spline_from_json(j.at("ground_truth"));
            }
        }
        if (j.contains("y")) doc.y = j.at("y").get<std::vector<double>>();
        if (j.contains("solution")) {
            if (doc.mode == "tensor2d") {
                std::vector<TensorAtom> atoms;
                for (const auto& ja : j.at("solution").at("atoms"))
                    atoms.push_back(atom_from_json(ja));
                doc.solution = std::move(atoms);
            } else {
                doc.multi_solution = multi_spline_from_json(j.at("solution"));
            }
        }
        if (j.contains("objective")) doc.objective = j.at("objective").get<double>();
        if (j.contains("duality_gap")) doc.duality_gap = j.at("duality_gap").get<double>();
        if (j.contains("iterations")) doc.iterations = j.at("iterations").get<long>();
        if (j.contains("certification_text"))
            doc.certification_text = j.at("certification_text").get<std::string>();
        if (j.contains("certified")) doc.certified = j.at("certified").get<bool>();
    } catch (const DocumentError&) {
        throw;
    } catch (const std::exception& e) {
        throw DocumentError(std::string("document field error: ") + e.what());
    }
    return doc;
}

ProblemDocument ProblemDocument::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DocumentError("cannot open document: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ProblemDocument::write() const {
    ordered_json j;
    j["schema_version"] = schema_version;
    j["mode"] = mode;
    if (mode == "tensor2d") {
        j["operators"] = {{"alpha1", odo1.alpha},
                          {"order1", odo1.order},
                          {"alpha2", odo2.alpha},
                          {"order2", odo2.order}};
        j["domain"] = {{"k1", {domain.k1.lo, domain.k1.hi}},
                       {"k2", {domain.k2.lo, domain.k2.hi}}};
        j["system"] = system_kind;
        ordered_json fns = ordered_json::array();
        for (const auto& fn : functionals) fns.push_back(functional_to_json(fn));
        j["functionals"] = fns;
    } else {
        j["dimension"] = dimension;
        j["order"] = order;
        ordered_json fns = ordered_json::array();
        for (const auto& fn : multi_functionals) fns.push_back(multi_functional_to_json(fn));
        j["functionals"] = fns;
    }
    j["lambda"] = lambda;
    j["grid"] = {{"n2d", grid_n2d},
                 {"n1d", grid_n1d},
                 {"refinements", grid_refinements},
                 {"n1d_multi", multi_grid_n1d},
                 {"refinements_multi", multi_grid_refinements}};
    j["solver"] = {{"tol", tol}, {"max_iterations", max_iterations}};
    j["seed"] = seed;
    j["fidelity"] = fidelity;
    j["noise_sigma"] = noise_sigma;
    if (simulate_params) {
        j["simulate"] = {{"tensor_atoms", simulate_params->tensor_atoms},
                         {"poly_green_atoms", simulate_params->poly_green_atoms},
                         {"green_poly_atoms", simulate_params->green_poly_atoms},
                         {"weight_scale", simulate_params->weight_scale}};
    }
    if (mode == "tensor2d") {
        if (ground_truth) {
            ordered_json atoms = ordered_json::array();
            for (const auto& a : *ground_truth) atoms.push_back(atom_to_json(a));
            j["ground_truth"] = {{"atoms", atoms}};
        }
    } else if (multi_ground_truth) {
        j["ground_truth"] = multi_spline_to_json(*multi_ground_truth);
    }
    if (y) j["y"] = *y;
    if (mode == "tensor2d") {
        if (solution) {
            ordered_json atoms = ordered_json::array();
            for (const auto& a : *solution) atoms.push_back(atom_to_json(a));
            j["solution"] = {{"atoms", atoms}};
        }
    } else if (multi_solution) {
        j["solution"] = multi_spline_to_json(*multi_solution);
    }
    if (objective) j["objective"] = *objective;
    if (duality_gap) j["duality_gap"] = *duality_gap;
    if (iterations) j["iterations"] = *iterations;
    if (certification_text) j["certification_text"] = *certification_text;
    if (certified) j["certified"] = *certified;
    return j.dump(2) + "\n";
}

void ProblemDocument::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DocumentError("cannot write document: " + path);
    out << write();
}

Problem ProblemDocument::to_problem() const {
    if (mode != "tensor2d") throw DocumentError("to_problem: document is not in tensor2d mode");
    if (system_kind != "fundamental")
        throw AssumptionError("solver requires the fundamental system (Assumption 6); got \"" +
                              system_kind + "\"");
    Problem p;
    p.fwd = ForwardOperator{functionals, domain};
    p.lambda = lambda;
    p.odo1 = odo1;
    p.odo2 = odo2;
    p.domain = domain;
    p.tol = tol;
    p.max_iterations = max_iterations;
    if (y) {
        p.y = Eigen::Map<const Eigen::VectorXd>(y->data(), long(y->size()));
    }
    return p;
}

MultiProblem ProblemDocument::to_multi_problem() const {
    if (mode != "multidim") throw DocumentError("to_multi_problem: document mode mismatch");
    MultiProblem p;
    p.functionals = multi_functionals;
    p.lambda = lambda;
    p.dimension = dimension;
    p.order = order;
    p.tol = tol;
    p.max_iterations = max_iterations;
    if (y) p.y = Eigen::Map<const Eigen::VectorXd>(y->data(), long(y->size()));
    return p;
}

GridSpec ProblemDocument::to_grid() const {
    return default_grid(domain, grid_n2d, grid_n1d, grid_refinements);
}

MultiGrid ProblemDocument::to_multi_grid() const {
    return default_multi_grid(multi_grid_n1d, multi_grid_refinements);
}

TensorSpline ProblemDocument::ground_truth_spline() const {
    if (!ground_truth) throw DocumentError("document has no ground truth");
    return TensorSpline(odo1, odo2, domain, *ground_truth);
}

TensorSpline ProblemDocument::solution_spline() const {
    if (!solution) throw DocumentError("document has no solution");
    return TensorSpline(odo1, odo2, domain, *solution);
}

std::vector<TensorAtom> random_spline_atoms(const SimulateParams& params, const Rect& domain,
                                            const Odo& odo1, const Odo& odo2, Rng& rng) {
    std::vector<TensorAtom> atoms;
    auto weight = [&] { return rng.sign() * params.weight_scale * (0.25 + rng.uniform()); };
    for (int k = 0; k < params.tensor_atoms; ++k)
        atoms.push_back(TensorAtom{AtomFamily::TensorGreen, 0, 0, weight(),
                                   rng.uniform(domain.k1.lo, domain.k1.hi),
                                   rng.uniform(domain.k2.lo, domain.k2.hi)});
    for (int k = 0; k < params.poly_green_atoms; ++k)
        atoms.push_back(TensorAtom{AtomFamily::PolyGreen, 1 + int(rng.index(std::uint64_t(odo1.order))),
                                   0, weight(), 0.0, rng.uniform(domain.k2.lo, domain.k2.hi)});
    for (int k = 0; k < params.green_poly_atoms; ++k)
        atoms.push_back(TensorAtom{AtomFamily::GreenPoly, 0,
                                   1 + int(rng.index(std::uint64_t(odo2.order))), weight(),
                                   rng.uniform(domain.k1.lo, domain.k1.hi), 0.0});
    for (int i = 1; i <= odo1.order; ++i)
        for (int j = 1; j <= odo2.order; ++j)
            atoms.push_back(TensorAtom{AtomFamily::PolyPoly, i, j,
                                       params.weight_scale * rng.uniform(-0.5, 0.5), 0.0, 0.0});
    return atoms;
}

void simulate_document(ProblemDocument& doc, std::optional<std::uint64_t> seed_override) {
    if (seed_override) doc.seed = *seed_override;
    Rng rng(doc.seed);
    if (doc.mode == "tensor2d") {
        if (!doc.ground_truth) {
            if (!doc.simulate_params)
                throw DocumentError("simulate: need ground_truth or simulate parameters");
            doc.ground_truth =
                random_spline_atoms(*doc.simulate_params, doc.domain, doc.odo1, doc.odo2, rng);
        }
        const TensorSpline truth = doc.ground_truth_spline();
        std::vector<double> y;
        y.reserve(doc.functionals.size());
        for (const auto& fn : doc.functionals)
            y.push_back(measure(truth, fn) + doc.noise_sigma * rng.normal());
        doc.y = std::move(y);
    } else {
        if (!doc.multi_ground_truth)
            throw DocumentError("simulate: multidim documents need an explicit ground truth");
        std::vector<double> y;
        const MultiProblem p = doc.to_multi_problem();
        for (const auto& fn : p.functionals) {
            double value = 0.0;
            if (fn.is_dirac) {
                value = multi_eval(*doc.multi_ground_truth, fn.point);
            } else {
                // separable closed-form measurement, one factor per axis
                for (const auto& a : doc.multi_ground_truth->atoms) {
                    double prod = a.weight;
                    for (int d = 0; d < doc.multi_ground_truth->dimension && prod != 0.0; ++d) {
                        const auto& f = a.factors[std::size_t(d)];
                        const PiecewisePolyExp ppe =
                            f.is_green ? green_ppe(Odo{0.0, doc.multi_ground_truth->order}, f.knot)
                                       : nullspace_ppe(Odo{0.0, doc.multi_ground_truth->order},
                                                       f.degree + 1, 0.0);
                        prod *= inner_product(ppe, fn.profiles[std::size_t(d)]);
                    }
                    value += prod;
                }
                const auto& nc = doc.multi_ground_truth->null_component;
                const int n = doc.multi_ground_truth->order;
                const int dim = doc.multi_ground_truth->dimension;
                for (std::size_t idx = 0; idx < nc.size(); ++idx) {
                    if (nc[idx] == 0.0) continue;
                    double prod = nc[idx];
                    long rest = long(idx);
                    std::vector<int> degrees(std::size_t(dim), 0);
                    for (int d = dim - 1; d >= 0; --d) {
                        degrees[std::size_t(d)] = int(rest % n);
                        rest /= n;
                    }
                    for (int d = 0; d < dim && prod != 0.0; ++d)
                        prod *= inner_product(nullspace_ppe(Odo{0.0, n}, degrees[std::size_t(d)] + 1, 0.0),
                                              fn.profiles[std::size_t(d)]);
                    value += prod;
                }
            }
            y.push_back(value + doc.noise_sigma * rng.normal());
        }
        doc.y = std::move(y);
    }
}

SolveStatus solve_document(ProblemDocument& doc, std::optional<std::uint64_t> seed_override,
                           std::optional<double> tol_override,
                           std::optional<std::pair<int, int>> grid_override) {
    if (seed_override) doc.seed = *seed_override;
    if (tol_override) doc.tol = *tol_override;
    if (grid_override) {
        doc.grid_n2d = grid_override->first;
        doc.grid_n1d = grid_override->second;
        doc.multi_grid_n1d = grid_override->second;
    }
    if (!doc.y) throw DocumentError("solve: document has no measurements y (run simulate first)");

    std::ostringstream summary;
    SolveStatus status;
    if (doc.mode == "tensor2d") {
        const Problem problem = doc.to_problem();
        const SolveResult result = solve_full(problem, doc.to_grid());
        doc.solution = result.spline.atoms();
        doc.objective = result.objective;
        doc.duality_gap = result.duality_gap;
        doc.iterations = result.iterations;
        const Certification& cert = result.certification;
        summary << "solve summary\n";
        summary << "  objective: " << fmt17(result.objective) << "\n";
        summary << "  duality gap: " << fmt17(result.duality_gap) << "\n";
        summary << "  iterations: " << result.iterations << "\n";
        summary << "  atoms: " << result.spline.atoms().size() << " (penalized "
                << cert.sparsity_count << ")\n";
        summary << "  sparsity: count " << cert.sparsity_count << " <= bound " << cert.bound
                << ": " << (cert.sparsity_ok ? "PASS" : "FAIL") << "\n";
        summary << "  localization in K: " << (cert.localization_ok ? "PASS" : "FAIL") << "\n";
        summary << "  interior knots: " << (cert.interior_ok ? "PASS" : "FAIL") << "\n";
        summary << "  duality gap <= tol: " << (cert.gap_ok ? "PASS" : "FAIL") << "\n";
        for (const auto& a : cert.offending)
            summary << "  offending atom: " << family_name(a.family) << " at (" << fmt17(a.x1)
                    << ", " << fmt17(a.x2) << ")\n";
        status.certified = cert.pass();
    } else {
        const MultiProblem problem = doc.to_multi_problem();
        const MultiSolveResult result = multi_solve(problem, doc.to_multi_grid());
        doc.multi_solution = result.spline;
        doc.objective = result.objective;
        doc.duality_gap = result.duality_gap;
        doc.iterations = result.iterations;
        const MultiCertification& cert = result.certification;
        summary << "solve summary (multidim D=" << problem.dimension << ", N=" << problem.order
                << ")\n";
        summary << "  objective: " << fmt17(result.objective) << "\n";
        summary << "  duality gap: " << fmt17(result.duality_gap) << "\n";
        summary << "  sparsity: count " << cert.sparsity_count << " <= bound " << cert.bound
                << ": " << (cert.sparsity_ok ? "PASS" : "FAIL") << "\n";
        summary << "  localization in [0,1]^D: " << (cert.localization_ok ? "PASS" : "FAIL")
                << "\n";
        summary << "  interior knots (informational): " << (cert.interior_ok ? "PASS" : "FAIL")
                << "\n";
        summary << "  duality gap <= tol: " << (cert.gap_ok ? "PASS" : "FAIL") << "\n";
        status.certified = cert.pass();
    }
    status.summary = summary.str();
    doc.certification_text = status.summary;
    doc.certified = status.certified;
    return status;
}

std::string atoms_csv(const std::vector<TensorAtom>& atoms) {
    std::ostringstream os;
    os << "family,n,n',weight,x1,x2\n";
    for (const auto& a : atoms) {
        os << family_name(a.family) << "," << a.n1 << "," << a.n2 << "," << fmt17(a.weight) << ","
           << fmt17(a.x1) << "," << fmt17(a.x2) << "\n";
    }
    return os.str();
}

}  // namespace tps
