/* C interface to the simplex assembly library.
 *
 * Objects are opaque handles owned by the caller and released with the matching *_free
 * function.  Every fallible call returns an sa_status; on failure sa_last_error() gives a
 * thread-local message describing the most recent error on the calling thread.
 */
#ifndef SIMPLEX_ASM_H
#define SIMPLEX_ASM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SIMPLEX_ASM_BUILDING)
#    define SA_API __declspec(dllexport)
#  else
#    define SA_API __declspec(dllimport)
#  endif
#else
#  define SA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sa_status {
    SA_OK = 0,
    SA_ERR_INVALID_ARGUMENT = 1,
    SA_ERR_DEGENERATE_SIMPLEX = 2,
    SA_ERR_INDEX_OUT_OF_RANGE = 3,
    SA_ERR_SHAPE_MISMATCH = 4,
    SA_ERR_PARSE = 5,
    SA_ERR_IO = 6,
    SA_ERR_CAPACITY = 7,
    SA_ERR_CONTRACT_VIOLATION = 8,
    SA_ERR_INTERNAL = 99
} sa_status;

typedef enum sa_matrix_kind {
    SA_MATRIX_MASS = 0,
    SA_MATRIX_STIFFNESS = 1,
    SA_MATRIX_ELASTIC = 2,
    SA_MATRIX_MASS_PK = 3
} sa_matrix_kind;

typedef enum sa_variant {
    SA_VARIANT_BASE = 0,
    SA_VARIANT_OPTV1 = 1,
    SA_VARIANT_OPTV2 = 2,
    SA_VARIANT_OPTV = 3,
    SA_VARIANT_OPTVS = 4
} sa_variant;

typedef enum sa_bench_mode {
    SA_BENCH_TIME = 0,
    SA_BENCH_VERIFY = 1,
    SA_BENCH_MEMORY = 2
} sa_bench_mode;

typedef enum sa_table_format {
    SA_FORMAT_CSV = 0,
    SA_FORMAT_MD = 1
} sa_table_format;

typedef struct sa_mesh sa_mesh;
typedef struct sa_matrix sa_matrix;
typedef struct sa_bench_report sa_bench_report;

SA_API const char* sa_last_error(void);
SA_API const char* sa_status_string(sa_status status);

/* Name lookups shared with the command-line tool ("mass", "optvs", "verify", ...). */
SA_API sa_status sa_matrix_kind_from_name(const char* name, sa_matrix_kind* out);
SA_API sa_status sa_variant_from_name(const char* name, sa_variant* out);
SA_API sa_status sa_bench_mode_from_name(const char* name, sa_bench_mode* out);
SA_API const char* sa_variant_name(sa_variant v);

/* Meshes */
SA_API sa_status sa_mesh_hypercube(int d, int64_t n, sa_mesh** out);
SA_API sa_status sa_mesh_read(const char* path, sa_mesh** out);
SA_API sa_status sa_mesh_write(const sa_mesh* mesh, const char* path);
SA_API sa_status sa_mesh_validate(const sa_mesh* mesh);
SA_API sa_status sa_mesh_info(const sa_mesh* mesh, int* d, int64_t* nq, int64_t* nme);
SA_API sa_status sa_mesh_total_volume(const sa_mesh* mesh, double* out);
SA_API void sa_mesh_free(sa_mesh* mesh);

/* Assembly */
typedef struct sa_assemble_options {
    sa_matrix_kind matrix;
    sa_variant variant;
    int order;        /* mass-pk polynomial order, ignored otherwise */
    int weight_x1;    /* mass: 0 for w = 1, nonzero for w(q) = q_1 */
    double lambda;    /* elastic: constant Lame parameters */
    double mu;
} sa_assemble_options;

SA_API void sa_assemble_options_init(sa_assemble_options* opts);
SA_API sa_status sa_assemble(const sa_mesh* mesh, const sa_assemble_options* opts, sa_matrix** out);

/* Sparse matrices (canonical CSR) */
SA_API sa_status sa_matrix_read_mm(const char* path, sa_matrix** out);
SA_API sa_status sa_matrix_write_mm(const sa_matrix* m, const char* path);
SA_API sa_status sa_matrix_info(const sa_matrix* m, int64_t* nrows, int64_t* ncols, int64_t* nnz);
/* Borrowed pointers valid until sa_matrix_free. */
SA_API sa_status sa_matrix_csr(const sa_matrix* m, const int64_t** row_ptr, const int64_t** col_idx,
                               const double** values);
SA_API sa_status sa_matrix_max_abs_diff(const sa_matrix* a, const sa_matrix* b, double* out);
SA_API void sa_matrix_free(sa_matrix* m);

/* Benchmarks */
typedef struct sa_bench_config {
    sa_matrix_kind matrix;
    int d;
    int order;
    const sa_variant* variants;
    size_t num_variants;
    const int64_t* refine;
    size_t num_refine;
    int reps;
    sa_bench_mode mode;
    int parallel_verify;
} sa_bench_config;

typedef struct sa_bench_record {
    sa_variant variant;
    int d;
    int64_t ndof;
    int64_t nme;
    double time_mean_s;
    double time_median_s;
    uint64_t aux_bytes;
    double speedup;
    double slope;
    double max_rel_diff;
} sa_bench_record;

SA_API void sa_bench_config_init(sa_bench_config* cfg);
SA_API sa_status sa_bench_run(const sa_bench_config* cfg, sa_bench_report** out);
SA_API size_t sa_bench_report_size(const sa_bench_report* r);
SA_API sa_status sa_bench_report_record(const sa_bench_report* r, size_t i, sa_bench_record* out);
/* 1 when every cross-variant difference is within tolerance (always 1 outside verify mode). */
SA_API int sa_bench_report_verified(const sa_bench_report* r);
SA_API double sa_bench_report_worst_rel_diff(const sa_bench_report* r);
SA_API double sa_bench_report_memory_ratio(const sa_bench_report* r);
/* Borrowed strings valid until sa_bench_report_free. */
SA_API const char* sa_bench_report_table(sa_bench_report* r, sa_table_format format);
SA_API const char* sa_bench_report_summary(sa_bench_report* r);
SA_API void sa_bench_report_free(sa_bench_report* r);

#ifdef __cplusplus
}
#endif

#endif
