/* C API for the tensor-product spline library. All functions return a
 * tps_status; on failure, tps_last_error() describes the problem. Objects are
 * opaque handles owned by the library and released with the matching _free
 * call. Strings returned through char** are released with tps_string_free. */

#ifndef TPS_H
#define TPS_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tps_status {
    TPS_OK = 0,
    TPS_ERR = 1,               /* parse error, bad arguments, I/O failure */
    TPS_ERR_ASSUMPTION = 2,    /* a well-posedness assumption is violated */
    TPS_ERR_NO_CONVERGENCE = 3,/* solver hit its iteration cap */
    TPS_ERR_CERTIFICATION = 4  /* pipeline ran but a certificate failed */
} tps_status;

typedef struct tps_document tps_document;

const char* tps_version(void);

/* Thread-local message for the most recent failure. */
const char* tps_last_error(void);

void tps_string_free(char* text);

tps_status tps_document_read(const char* path, tps_document** out);
tps_status tps_document_parse(const char* text, tps_document** out);
tps_status tps_document_write(const tps_document* doc, const char* path);
tps_status tps_document_to_string(const tps_document* doc, char** out_text);
void tps_document_free(tps_document* doc);

typedef struct tps_run_options {
    int has_seed;
    uint64_t seed;
    int has_tol;
    double tol;
    int has_grid;
    int grid_n2d;
    int grid_n1d;
} tps_run_options;

void tps_run_options_init(tps_run_options* opt);

/* Fills y from the (possibly generated) ground truth plus noise. */
tps_status tps_simulate(tps_document* doc, const tps_run_options* opt);

/* Full pipeline: assemble, solve, refine, reduce, canonicalize, certify.
 * The document gains the solution fields. out_summary (optional) receives the
 * certification summary. Returns TPS_ERR_CERTIFICATION when a verdict fails. */
tps_status tps_solve(tps_document* doc, const tps_run_options* opt, char** out_summary);

/* Writes result.json, atoms.csv (tensor2d mode) and summary.txt to out_dir. */
tps_status tps_write_outputs(const tps_document* doc, const char* out_dir);

typedef struct tps_render_options {
    int raster;
    int has_window;
    double x0, x1, y0, y1;
} tps_render_options;

void tps_render_options_init(tps_render_options* opt);

/* Writes spline.svg and decomposition.svg to out_dir. */
tps_status tps_render(const tps_document* doc, const tps_render_options* opt,
                      const char* out_dir);

/* Runs one verify suite ("all" runs everything). representer_instances <= 0
 * selects the full 50-instance runs. With stream_to_stdout, verdict lines are
 * printed as they are produced; otherwise they are returned in out_report.
 * out_passed receives 1 when every check passed. */
tps_status tps_verify(const char* suite, uint64_t seed, int representer_instances,
                      int stream_to_stdout, char** out_report, int* out_passed);

#ifdef __cplusplus
}
#endif

#endif /* TPS_H */
