// Command-line front end. Links only the shared C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tps.h"

namespace {

int report_error(tps_status status) {
    std::fprintf(stderr, "error: %s\n", tps_last_error());
    return int(status);
}

struct DocumentGuard {
    tps_document* doc = nullptr;
    ~DocumentGuard() { tps_document_free(doc); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor-product spline toolkit"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", suite = "all";
    std::uint64_t seed = 0;
    bool has_seed = false;
    double tol = 0.0;
    bool has_tol = false;
    std::vector<int> grid;
    std::vector<double> window;
    int raster = 256;
    int instances = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config, "problem/result document path");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
            has_seed = true;
        });
    };

    auto* simulate = app.add_subcommand("simulate", "fill y from the ground truth");
    add_common(simulate, true);

    auto* solve = app.add_subcommand("solve", "run the full solve pipeline");
    add_common(solve, true);
    solve->add_option("--tol", tol, "duality-gap tolerance")->each([&](const std::string&) {
        has_tol = true;
    });
    solve->add_option("--grid", grid, "candidate grid sizes: n2d,n1d")->expected(2)->delimiter(',');

    auto* render = app.add_subcommand("render", "write SVG plots for a document");
    add_common(render, true);
    render->add_option("--raster", raster, "heatmap resolution per axis");
    render->add_option("--extended-window", window, "plot window x0,x1,y0,y1")
        ->expected(4)
        ->delimiter(',');

    auto* verify = app.add_subcommand("verify", "run a property suite");
    add_common(verify, false);
    verify->add_option("--suite", suite, "suite name (see README) or 'all'");
    verify->add_option("--instances", instances,
                       "instances per configuration for the solver-heavy suites");

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) {
        int passed = 0;
        const tps_status status =
            tps_verify(suite.c_str(), seed, instances, /*stream_to_stdout=*/1, nullptr, &passed);
        if (status != TPS_OK) return report_error(status);
        return passed ? 0 : 1;
    }

    DocumentGuard guard;
    tps_status status = tps_document_read(config.c_str(), &guard.doc);
    if (status != TPS_OK) return report_error(status);

    tps_run_options run;
    tps_run_options_init(&run);
    if (has_seed) {
        run.has_seed = 1;
        run.seed = seed;
    }
    if (has_tol) {
        run.has_tol = 1;
        run.tol = tol;
    }
    if (grid.size() == 2) {
        run.has_grid = 1;
        run.grid_n2d = grid[0];
        run.grid_n1d = grid[1];
    }

    if (simulate->parsed()) {
        status = tps_simulate(guard.doc, &run);
        if (status != TPS_OK) return report_error(status);
        const std::string path = out_dir + "/simulated.json";
        status = tps_document_write(guard.doc, path.c_str());
        if (status != TPS_OK) return report_error(status);
        std::printf("wrote %s\n", path.c_str());
        return 0;
    }

    if (solve->parsed()) {
        char* summary = nullptr;
        status = tps_solve(guard.doc, &run, &summary);
        if (summary) {
            std::fputs(summary, stdout);
            tps_string_free(summary);
        }
        if (status != TPS_OK && status != TPS_ERR_CERTIFICATION) return report_error(status);
        const tps_status write_status = tps_write_outputs(guard.doc, out_dir.c_str());
        if (write_status != TPS_OK) return report_error(write_status);
        std::printf("wrote %s/result.json\n", out_dir.c_str());
        if (status == TPS_ERR_CERTIFICATION) {
            std::fprintf(stderr, "certification failed\n");
            return int(status);
        }
        return 0;
    }

    if (render->parsed()) {
        tps_render_options ropt;
        tps_render_options_init(&ropt);
        ropt.raster = raster;
        if (window.size() == 4) {
            ropt.has_window = 1;
            ropt.x0 = window[0];
            ropt.x1 = window[1];
            ropt.y0 = window[2];
            ropt.y1 = window[3];
        }
        status = tps_render(guard.doc, &ropt, out_dir.c_str());
        if (status != TPS_OK) return report_error(status);
        std::printf("wrote %s/spline.svg and %s/decomposition.svg\n", out_dir.c_str(),
                    out_dir.c_str());
        return 0;
    }

    return 0;
}
