#include "tps.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "tps/document.hpp"
#include "tps/errors.hpp"
#include "tps/render.hpp"
#include "tps/verify.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tps_status fail(tps_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
tps_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const tps::AssumptionError& e) {
        return fail(TPS_ERR_ASSUMPTION, e.what());
    } catch (const tps::NoConvergenceError& e) {
        return fail(TPS_ERR_NO_CONVERGENCE, e.what());
    } catch (const std::exception& e) {
        return fail(TPS_ERR, e.what());
    } catch (...) {
        return fail(TPS_ERR, "unknown error");
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tps::DocumentError("cannot write " + path);
    out << content;
}

}  // namespace

extern "C" {

struct tps_document {
    tps::ProblemDocument doc;
};

const char* tps_version(void) { return "1.0.0"; }

const char* tps_last_error(void) { return g_last_error.c_str(); }

void tps_string_free(char* text) { delete[] text; }

tps_status tps_document_read(const char* path, tps_document** out) {
    if (!path || !out) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        auto* handle = new tps_document{tps::ProblemDocument::read_file(path)};
        *out = handle;
        return TPS_OK;
    });
}

tps_status tps_document_parse(const char* text, tps_document** out) {
    if (!text || !out) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        auto* handle = new tps_document{tps::ProblemDocument::parse(text)};
        *out = handle;
        return TPS_OK;
    });
}

tps_status tps_document_write(const tps_document* doc, const char* path) {
    if (!doc || !path) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        doc->doc.write_file(path);
        return TPS_OK;
    });
}

tps_status tps_document_to_string(const tps_document* doc, char** out_text) {
    if (!doc || !out_text) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        *out_text = dup_string(doc->doc.write());
        return TPS_OK;
    });
}

void tps_document_free(tps_document* doc) { delete doc; }

void tps_run_options_init(tps_run_options* opt) {
    if (opt) *opt = tps_run_options{};
}

tps_status tps_simulate(tps_document* doc, const tps_run_options* opt) {
    if (!doc) return fail(TPS_ERR, "null document");
    return guarded([&] {
        std::optional<std::uint64_t> seed;
        if (opt && opt->has_seed) seed = opt->seed;
        tps::simulate_document(doc->doc, seed);
        return TPS_OK;
    });
}

tps_status tps_solve(tps_document* doc, const tps_run_options* opt, char** out_summary) {
    if (!doc) return fail(TPS_ERR, "null document");
    return guarded([&] {
        std::optional<std::uint64_t> seed;
        std::optional<double> tol;
        std::optional<std::pair<int, int>> grid;
        if (opt && opt->has_seed) seed = opt->seed;
        if (opt && opt->has_tol) tol = opt->tol;
        if (opt && opt->has_grid) grid = std::make_pair(opt->grid_n2d, opt->grid_n1d);
        const tps::SolveStatus status = tps::solve_document(doc->doc, seed, tol, grid);
        if (out_summary) *out_summary = dup_string(status.summary);
        if (!status.certified) return fail(TPS_ERR_CERTIFICATION, "certification failed");
        return TPS_OK;
    });
}

tps_status tps_write_outputs(const tps_document* doc, const char* out_dir) {
    if (!doc || !out_dir) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path base(out_dir);
        doc->doc.write_file((base / "result.json").string());
        if (doc->doc.mode == "tensor2d" && doc->doc.solution)
            write_text_file((base / "atoms.csv").string(), tps::atoms_csv(*doc->doc.solution));
        if (doc->doc.certification_text)
            write_text_file((base / "summary.txt").string(), *doc->doc.certification_text);
        return TPS_OK;
    });
}

void tps_render_options_init(tps_render_options* opt) {
    if (!opt) return;
    *opt = tps_render_options{};
    opt->raster = 256;
}

tps_status tps_render(const tps_document* doc, const tps_render_options* opt,
                      const char* out_dir) {
    if (!doc || !out_dir) return fail(TPS_ERR, "null argument");
    return guarded([&] {
        tps::RenderOptions options;
        if (opt) {
            options.raster = opt->raster > 0 ? opt->raster : 256;
            options.has_window = opt->has_window != 0;
            options.x0 = opt->x0;
            options.x1 = opt->x1;
            options.y0 = opt->y0;
            options.y1 = opt->y1;
        }
        std::filesystem::create_directories(out_dir);
        const auto files = tps::render_document(doc->doc, options);
        for (const auto& [name, content] : files)
            write_text_file((std::filesystem::path(out_dir) / name).string(), content);
        return TPS_OK;
    });
}

tps_status tps_verify(const char* suite, uint64_t seed, int representer_instances,
                      int stream_to_stdout, char** out_report, int* out_passed) {
    if (!suite) return fail(TPS_ERR, "null suite name");
    return guarded([&] {
        const int instances = representer_instances > 0 ? representer_instances : 50;
        std::ostringstream buffer;
        std::ostream& os = stream_to_stdout ? std::cout : static_cast<std::ostream&>(buffer);
        const tps::verify::SuiteResult result = tps::verify::run_suite(suite, seed, os, instances);
        std::ostringstream tail;
        tail << "suite " << result.name << ": " << (result.pass() ? "PASS" : "FAIL") << " ("
             << (result.checks - result.failures) << "/" << result.checks << " checks)\n";
        if (stream_to_stdout) std::cout << tail.str();
        if (out_report)
            *out_report = dup_string(stream_to_stdout ? tail.str() : buffer.str() + tail.str());
        if (out_passed) *out_passed = result.pass() ? 1 : 0;
        return TPS_OK;
    });
}

}  // extern "C"
