/* crashtriage - dedup and clustering of Linux crash reports by call-stack
 * similarity. C interface of the shared library; everything lives behind
 * opaque handles, errors come back as status codes, and the message for
 * the last failure on the calling thread is available via ct_last_error().
 */
#ifndef CRASHTRIAGE_H
#define CRASHTRIAGE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
    CT_OK = 0,
    CT_ERROR_INVALID_ARGUMENT = 1,
    CT_ERROR_PARSE = 2,           /* unusable backtrace text */
    CT_ERROR_SCHEMA = 3,          /* report file violates the JSON schema */
    CT_ERROR_NO_INPUT = 4,        /* missing directory or no valid reports */
    CT_ERROR_IO = 5,
    CT_ERROR_OUTPUT_CONFLICT = 6, /* output directory exists and is not empty */
    CT_ERROR_INTERNAL = 7
} ct_status;

/* Stable identifier string for a status code, e.g. "output_conflict". */
const char* ct_status_name(ct_status status);

/* Message describing the most recent failure on this thread, or "" if the
 * last call succeeded. The pointer stays valid until the next library call
 * on the same thread. */
const char* ct_last_error(void);

/* ---- options ---------------------------------------------------------- */

typedef struct ct_options ct_options;

/* Defaults: top_coef 0.04, rel_coef 0.13, threshold 0.3, trimming on,
 * jobs = all processors, no forced overwrite, no matrix export. */
ct_options* ct_options_new(void);
void ct_options_free(ct_options* options);

ct_status ct_options_set_coefficients(ct_options* options, double top_coef, double rel_coef);
ct_status ct_options_set_threshold(ct_options* options, double threshold);
ct_status ct_options_set_trim(ct_options* options, int enabled);
ct_status ct_options_set_jobs(ct_options* options, unsigned jobs); /* 0 = all processors */
ct_status ct_options_set_force(ct_options* options, int force);

/* Frames whose module basename contains `substring` count as libc. */
ct_status ct_options_set_libc_module(ct_options* options, const char* substring);
/* Comma-separated list of abort-chain entry functions replacing the
 * built-in raise/abort/assert set. */
ct_status ct_options_set_libc_functions(ct_options* options, const char* comma_separated);
/* Write the condensed distance matrix here after clustering; NULL disables. */
ct_status ct_options_set_export_matrix(ct_options* options, const char* path);

/* Invoked once per skipped input file during directory runs. */
typedef void (*ct_warning_fn)(const char* path, const char* message, void* userdata);
ct_status ct_options_set_warning_handler(ct_options* options, ct_warning_fn fn, void* userdata);

/* ---- call stacks and the similarity metric ---------------------------- */

typedef struct ct_stack ct_stack;

/* Parses the textual backtrace format of a debugger session ("#0 0x...
 * in func () at file:line"). On success *out owns the parsed stack. */
ct_status ct_stack_parse_gdb(const char* text, ct_stack** out);
void ct_stack_free(ct_stack* stack);
size_t ct_stack_frame_count(const ct_stack* stack);

/* Similarity in [0, 1] (1 = same stack) and distance = 1 - similarity.
 * Applies the trimming policy and coefficients from options; pass NULL for
 * defaults. */
ct_status ct_stack_similarity(const ct_stack* a, const ct_stack* b,
                              const ct_options* options, double* out);
ct_status ct_stack_distance(const ct_stack* a, const ct_stack* b,
                            const ct_options* options, double* out);

/* ---- directory pipelines ---------------------------------------------- */

/* Counters and timings of one run. Fields for phases that did not run hold
 * -1 (counts) or -1.0 (seconds). */
typedef struct ct_run_stats {
    size_t report_count;
    long long unique_count;
    long long cluster_count;
    long long avg_per_cluster;
    double dedup_seconds;
    double clustering_seconds;
} ct_run_stats;

/* Moves duplicate reports (identical frame-key sequences) from in_dir into
 * in_dir/duplicates/, keeping the lexicographically first file of each
 * group. stats may be NULL. */
ct_status ct_dedup_directory(const char* in_dir, const ct_options* options,
                             ct_run_stats* stats);

/* Clusters every report in in_dir and copies the files into
 * out_dir/cl1..clK/. out_dir must be empty or missing unless the force
 * option is set. stats may be NULL. */
ct_status ct_cluster_directory(const char* in_dir, const char* out_dir,
                               const ct_options* options, ct_run_stats* stats);

#ifdef __cplusplus
}
#endif

#endif /* CRASHTRIAGE_H */
