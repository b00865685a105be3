#include "simplex_asm/simplex_asm.h"

#include "simplex_asm/assembly.hpp"
#include "simplex_asm/bench.hpp"

#include <new>
#include <string>

using namespace simplex_asm;

struct sa_mesh {
    Mesh mesh;
};

struct sa_matrix {
    SparseMatrix matrix;
};

struct sa_bench_report {
    BenchConfig config;
    BenchReport report;
    std::string table;
    std::string summary;
};

namespace {

thread_local std::string g_last_error;

sa_status to_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return SA_ERR_INVALID_ARGUMENT;
    case ErrorCode::degenerate_simplex: return SA_ERR_DEGENERATE_SIMPLEX;
    case ErrorCode::index_out_of_range: return SA_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::shape_mismatch: return SA_ERR_SHAPE_MISMATCH;
    case ErrorCode::parse_error: return SA_ERR_PARSE;
    case ErrorCode::io_error: return SA_ERR_IO;
    case ErrorCode::capacity: return SA_ERR_CAPACITY;
    case ErrorCode::contract_violation: return SA_ERR_CONTRACT_VIOLATION;
    }
    return SA_ERR_INTERNAL;
}

template <typename F>
sa_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return SA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SA_ERR_CAPACITY;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SA_ERR_INTERNAL;
    }
}

sa_status null_arg(const char* what)
{
    g_last_error = std::string("null argument: ") + what;
    return SA_ERR_INVALID_ARGUMENT;
}

Variant to_variant(sa_variant v)
{
    switch (v) {
    case SA_VARIANT_BASE: return Variant::base;
    case SA_VARIANT_OPTV1: return Variant::optv1;
    case SA_VARIANT_OPTV2: return Variant::optv2;
    case SA_VARIANT_OPTV: return Variant::optv;
    case SA_VARIANT_OPTVS: return Variant::optvs;
    }
    throw Error(ErrorCode::invalid_argument, "unknown variant value");
}

sa_variant from_variant(Variant v)
{
    return static_cast<sa_variant>(static_cast<int>(v));
}

MatrixKind to_kind(sa_matrix_kind k)
{
    switch (k) {
    case SA_MATRIX_MASS: return MatrixKind::mass;
    case SA_MATRIX_STIFFNESS: return MatrixKind::stiffness;
    case SA_MATRIX_ELASTIC: return MatrixKind::elastic;
    case SA_MATRIX_MASS_PK: return MatrixKind::mass_pk;
    }
    throw Error(ErrorCode::invalid_argument, "unknown matrix kind value");
}

} // namespace

extern "C" {

const char* sa_last_error(void)
{
    return g_last_error.c_str();
}

const char* sa_status_string(sa_status status)
{
    switch (status) {
    case SA_OK: return "ok";
    case SA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SA_ERR_DEGENERATE_SIMPLEX: return "degenerate simplex";
    case SA_ERR_INDEX_OUT_OF_RANGE: return "index out of range";
    case SA_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case SA_ERR_PARSE: return "parse error";
    case SA_ERR_IO: return "i/o error";
    case SA_ERR_CAPACITY: return "capacity exceeded";
    case SA_ERR_CONTRACT_VIOLATION: return "contract violation";
    case SA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sa_status sa_matrix_kind_from_name(const char* name, sa_matrix_kind* out)
{
    if (name == nullptr || out == nullptr) return null_arg("name/out");
    return guarded([&] {
        const auto k = parse_matrix_kind(name);
        if (!k) throw Error(ErrorCode::invalid_argument, std::string("unknown matrix '") + name + "'");
        *out = static_cast<sa_matrix_kind>(static_cast<int>(*k));
    });
}

sa_status sa_variant_from_name(const char* name, sa_variant* out)
{
    if (name == nullptr || out == nullptr) return null_arg("name/out");
    return guarded([&] {
        const auto v = parse_variant(name);
        if (!v) throw Error(ErrorCode::invalid_argument, std::string("unknown variant '") + name + "'");
        *out = from_variant(*v);
    });
}

sa_status sa_bench_mode_from_name(const char* name, sa_bench_mode* out)
{
    if (name == nullptr || out == nullptr) return null_arg("name/out");
    return guarded([&] {
        const auto m = parse_bench_mode(name);
        if (!m) throw Error(ErrorCode::invalid_argument, std::string("unknown mode '") + name + "'");
        *out = static_cast<sa_bench_mode>(static_cast<int>(*m));
    });
}

const char* sa_variant_name(sa_variant v)
{
    try {
        return variant_name(to_variant(v)).data();
    } catch (...) {
        return "unknown";
    }
}

sa_status sa_mesh_hypercube(int d, int64_t n, sa_mesh** out)
{
    if (out == nullptr) return null_arg("out");
    return guarded([&] { *out = new sa_mesh{generate_hypercube_mesh(d, n)}; });
}

sa_status sa_mesh_read(const char* path, sa_mesh** out)
{
    if (path == nullptr || out == nullptr) return null_arg("path/out");
    return guarded([&] { *out = new sa_mesh{read_mesh(path)}; });
}

sa_status sa_mesh_write(const sa_mesh* mesh, const char* path)
{
    if (mesh == nullptr || path == nullptr) return null_arg("mesh/path");
    return guarded([&] { write_mesh(mesh->mesh, path); });
}

sa_status sa_mesh_validate(const sa_mesh* mesh)
{
    if (mesh == nullptr) return null_arg("mesh");
    return guarded([&] { validate(mesh->mesh); });
}

sa_status sa_mesh_info(const sa_mesh* mesh, int* d, int64_t* nq, int64_t* nme)
{
    if (mesh == nullptr) return null_arg("mesh");
    if (d) *d = mesh->mesh.d;
    if (nq) *nq = mesh->mesh.nq;
    if (nme) *nme = mesh->mesh.nme;
    return SA_OK;
}

sa_status sa_mesh_total_volume(const sa_mesh* mesh, double* out)
{
    if (mesh == nullptr || out == nullptr) return null_arg("mesh/out");
    double s = 0.0;
    for (double v : mesh->mesh.vols) s += v;
    *out = s;
    return SA_OK;
}

void sa_mesh_free(sa_mesh* mesh)
{
    delete mesh;
}

void sa_assemble_options_init(sa_assemble_options* opts)
{
    if (opts == nullptr) return;
    opts->matrix = SA_MATRIX_STIFFNESS;
    opts->variant = SA_VARIANT_OPTVS;
    opts->order = 1;
    opts->weight_x1 = 0;
    opts->lambda = 1.0;
    opts->mu = 1.0;
}

sa_status sa_assemble(const sa_mesh* mesh, const sa_assemble_options* opts, sa_matrix** out)
{
    if (mesh == nullptr || opts == nullptr || out == nullptr) return null_arg("mesh/opts/out");
    return guarded([&] {
        ProblemSpec spec;
        spec.kind = to_kind(opts->matrix);
        spec.order = opts->order;
        if (opts->weight_x1) {
            spec.weight = [](std::span<const double> x) { return x[0]; };
        }
        const double lam = opts->lambda, mu = opts->mu;
        spec.lambda = [lam](std::span<const double>) { return lam; };
        spec.mu = [mu](std::span<const double>) { return mu; };
        const PreparedProblem problem(mesh->mesh, std::move(spec));
        *out = new sa_matrix{problem.assemble(to_variant(opts->variant))};
    });
}

sa_status sa_matrix_read_mm(const char* path, sa_matrix** out)
{
    if (path == nullptr || out == nullptr) return null_arg("path/out");
    return guarded([&] { *out = new sa_matrix{read_matrixmarket(path)}; });
}

sa_status sa_matrix_write_mm(const sa_matrix* m, const char* path)
{
    if (m == nullptr || path == nullptr) return null_arg("matrix/path");
    return guarded([&] { write_matrixmarket(m->matrix, path); });
}

sa_status sa_matrix_info(const sa_matrix* m, int64_t* nrows, int64_t* ncols, int64_t* nnz)
{
    if (m == nullptr) return null_arg("matrix");
    if (nrows) *nrows = m->matrix.rows();
    if (ncols) *ncols = m->matrix.cols();
    if (nnz) *nnz = m->matrix.nnz();
    return SA_OK;
}

sa_status sa_matrix_csr(const sa_matrix* m, const int64_t** row_ptr, const int64_t** col_idx,
                        const double** values)
{
    if (m == nullptr) return null_arg("matrix");
    if (row_ptr) *row_ptr = m->matrix.row_ptr().data();
    if (col_idx) *col_idx = m->matrix.col_idx().data();
    if (values) *values = m->matrix.values().data();
    return SA_OK;
}

sa_status sa_matrix_max_abs_diff(const sa_matrix* a, const sa_matrix* b, double* out)
{
    if (a == nullptr || b == nullptr || out == nullptr) return null_arg("a/b/out");
    return guarded([&] { *out = max_abs_diff(a->matrix, b->matrix); });
}

void sa_matrix_free(sa_matrix* m)
{
    delete m;
}

void sa_bench_config_init(sa_bench_config* cfg)
{
    if (cfg == nullptr) return;
    cfg->matrix = SA_MATRIX_STIFFNESS;
    cfg->d = 2;
    cfg->order = 2;
    cfg->variants = nullptr;
    cfg->num_variants = 0;
    cfg->refine = nullptr;
    cfg->num_refine = 0;
    cfg->reps = 5;
    cfg->mode = SA_BENCH_TIME;
    cfg->parallel_verify = 0;
}

sa_status sa_bench_run(const sa_bench_config* cfg, sa_bench_report** out)
{
    if (cfg == nullptr || out == nullptr) return null_arg("config/out");
    if ((cfg->num_variants > 0 && cfg->variants == nullptr) ||
        (cfg->num_refine > 0 && cfg->refine == nullptr)) {
        return null_arg("variants/refine");
    }
    return guarded([&] {
        BenchConfig c;
        c.matrix = to_kind(cfg->matrix);
        c.d = cfg->d;
        c.order = cfg->order;
        for (std::size_t i = 0; i < cfg->num_variants; ++i) c.variants.push_back(to_variant(cfg->variants[i]));
        c.refine.assign(cfg->refine, cfg->refine + cfg->num_refine);
        c.reps = cfg->reps;
        switch (cfg->mode) {
        case SA_BENCH_TIME: c.mode = BenchMode::time; break;
        case SA_BENCH_VERIFY: c.mode = BenchMode::verify; break;
        case SA_BENCH_MEMORY: c.mode = BenchMode::memory; break;
        default: throw Error(ErrorCode::invalid_argument, "unknown bench mode value");
        }
        c.parallel_verify = cfg->parallel_verify != 0;
        auto report = run_bench(c);
        *out = new sa_bench_report{std::move(c), std::move(report), {}, {}};
    });
}

size_t sa_bench_report_size(const sa_bench_report* r)
{
    return r ? r->report.records.size() : 0;
}

sa_status sa_bench_report_record(const sa_bench_report* r, size_t i, sa_bench_record* out)
{
    if (r == nullptr || out == nullptr) return null_arg("report/out");
    if (i >= r->report.records.size()) {
        g_last_error = "record index out of range";
        return SA_ERR_INDEX_OUT_OF_RANGE;
    }
    const auto& rec = r->report.records[i];
    out->variant = from_variant(rec.variant);
    out->d = rec.d;
    out->ndof = rec.ndof;
    out->nme = rec.nme;
    out->time_mean_s = rec.time_mean_s;
    out->time_median_s = rec.time_median_s;
    out->aux_bytes = rec.aux_bytes;
    out->speedup = rec.speedup;
    out->slope = rec.slope;
    out->max_rel_diff = rec.max_rel_diff;
    return SA_OK;
}

int sa_bench_report_verified(const sa_bench_report* r)
{
    return r && r->report.verified ? 1 : 0;
}

double sa_bench_report_worst_rel_diff(const sa_bench_report* r)
{
    return r ? r->report.worst_rel_diff : 0.0;
}

double sa_bench_report_memory_ratio(const sa_bench_report* r)
{
    return r ? r->report.optv2_to_optv_memory_ratio : 0.0;
}

const char* sa_bench_report_table(sa_bench_report* r, sa_table_format format)
{
    if (r == nullptr) return "";
    r->table = emit_table(r->report.records, format == SA_FORMAT_MD ? TableFormat::md : TableFormat::csv,
                          r->config.mode);
    return r->table.c_str();
}

const char* sa_bench_report_summary(sa_bench_report* r)
{
    if (r == nullptr) return "";
    r->summary = summarize(r->report, r->config);
    return r->summary.c_str();
}

void sa_bench_report_free(sa_bench_report* r)
{
    delete r;
}

} // extern "C"
