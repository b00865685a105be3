#include "simplex_asm/simplex_asm.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

std::string temp_path(const char* name)
{
    return (std::filesystem::temp_directory_path() / (std::string("simplex_asm_capi_") + name)).string();
}

} // namespace

TEST(CApi, NameLookups)
{
    sa_matrix_kind k;
    EXPECT_EQ(sa_matrix_kind_from_name("mass-pk", &k), SA_OK);
    EXPECT_EQ(k, SA_MATRIX_MASS_PK);
    EXPECT_EQ(sa_matrix_kind_from_name("nope", &k), SA_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(sa_last_error()).find("nope"), std::string::npos);
    sa_variant v;
    EXPECT_EQ(sa_variant_from_name("optv1", &v), SA_OK);
    EXPECT_EQ(v, SA_VARIANT_OPTV1);
    EXPECT_STREQ(sa_variant_name(SA_VARIANT_OPTVS), "optvs");
    sa_bench_mode m;
    EXPECT_EQ(sa_bench_mode_from_name("memory", &m), SA_OK);
    EXPECT_EQ(m, SA_BENCH_MEMORY);
    EXPECT_EQ(sa_variant_from_name(nullptr, &v), SA_ERR_INVALID_ARGUMENT);
    EXPECT_STREQ(sa_status_string(SA_ERR_DEGENERATE_SIMPLEX), "degenerate simplex");
}

TEST(CApi, MeshLifecycle)
{
    sa_mesh* mesh = nullptr;
    ASSERT_EQ(sa_mesh_hypercube(3, 2, &mesh), SA_OK);
    int d = 0;
    int64_t nq = 0, nme = 0;
    EXPECT_EQ(sa_mesh_info(mesh, &d, &nq, &nme), SA_OK);
    EXPECT_EQ(d, 3);
    EXPECT_EQ(nq, 27);
    EXPECT_EQ(nme, 48);
    double vol = 0.0;
    EXPECT_EQ(sa_mesh_total_volume(mesh, &vol), SA_OK);
    EXPECT_NEAR(vol, 1.0, 1e-14);
    EXPECT_EQ(sa_mesh_validate(mesh), SA_OK);

    const std::string p = temp_path("mesh.txt");
    EXPECT_EQ(sa_mesh_write(mesh, p.c_str()), SA_OK);
    sa_mesh* back = nullptr;
    ASSERT_EQ(sa_mesh_read(p.c_str(), &back), SA_OK);
    EXPECT_EQ(sa_mesh_info(back, &d, &nq, &nme), SA_OK);
    EXPECT_EQ(nme, 48);
    sa_mesh_free(back);
    sa_mesh_free(mesh);
    std::filesystem::remove(p);

    EXPECT_EQ(sa_mesh_hypercube(0, 2, &mesh), SA_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(sa_mesh_hypercube(3, 10000000, &mesh), SA_ERR_CAPACITY);
    EXPECT_EQ(sa_mesh_read("/nonexistent/file.mesh", &mesh), SA_ERR_IO);
    EXPECT_FALSE(std::string(sa_last_error()).empty());
    sa_mesh_free(nullptr);
}

TEST(CApi, AssembleAndInspect)
{
    sa_mesh* mesh = nullptr;
    ASSERT_EQ(sa_mesh_hypercube(2, 1, &mesh), SA_OK);
    sa_assemble_options opts;
    sa_assemble_options_init(&opts);
    opts.matrix = SA_MATRIX_STIFFNESS;
    opts.variant = SA_VARIANT_BASE;
    sa_matrix* s = nullptr;
    ASSERT_EQ(sa_assemble(mesh, &opts, &s), SA_OK);
    int64_t nr = 0, nc = 0, nnz = 0;
    sa_matrix_info(s, &nr, &nc, &nnz);
    EXPECT_EQ(nr, 4);
    EXPECT_EQ(nc, 4);
    const int64_t* rp = nullptr;
    const int64_t* ci = nullptr;
    const double* vals = nullptr;
    ASSERT_EQ(sa_matrix_csr(s, &rp, &ci, &vals), SA_OK);
    EXPECT_EQ(rp[4], nnz);
    for (int64_t i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int64_t p = rp[i]; p < rp[i + 1]; ++p) {
            row += vals[p];
            if (ci[p] == i) EXPECT_DOUBLE_EQ(vals[p], 1.0);
        }
        EXPECT_NEAR(row, 0.0, 1e-15);
    }

    opts.variant = SA_VARIANT_OPTVS;
    sa_matrix* t = nullptr;
    ASSERT_EQ(sa_assemble(mesh, &opts, &t), SA_OK);
    double diff = -1.0;
    EXPECT_EQ(sa_matrix_max_abs_diff(s, t, &diff), SA_OK);
    EXPECT_LE(diff, 1e-15);

    const std::string p = temp_path("m.mtx");
    EXPECT_EQ(sa_matrix_write_mm(t, p.c_str()), SA_OK);
    sa_matrix* r = nullptr;
    ASSERT_EQ(sa_matrix_read_mm(p.c_str(), &r), SA_OK);
    EXPECT_EQ(sa_matrix_max_abs_diff(r, t, &diff), SA_OK);
    EXPECT_EQ(diff, 0.0);
    std::filesystem::remove(p);

    opts.matrix = SA_MATRIX_MASS;
    opts.weight_x1 = 1;
    sa_matrix* mx = nullptr;
    ASSERT_EQ(sa_assemble(mesh, &opts, &mx), SA_OK);
    sa_matrix_info(mx, nullptr, nullptr, &nnz);
    sa_matrix_csr(mx, nullptr, nullptr, &vals);
    double total = 0.0;
    for (int64_t i = 0; i < nnz; ++i) total += vals[i];
    EXPECT_NEAR(total, 0.5, 1e-14);

    opts.matrix = SA_MATRIX_ELASTIC;
    opts.lambda = 2.0;
    opts.mu = 0.5;
    sa_matrix* k = nullptr;
    ASSERT_EQ(sa_assemble(mesh, &opts, &k), SA_OK);
    sa_matrix_info(k, &nr, nullptr, nullptr);
    EXPECT_EQ(nr, 8);

    sa_matrix* bad = nullptr;
    sa_mesh* line = nullptr;
    ASSERT_EQ(sa_mesh_hypercube(1, 3, &line), SA_OK);
    EXPECT_EQ(sa_assemble(line, &opts, &bad), SA_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(sa_matrix_max_abs_diff(s, k, &diff), SA_ERR_SHAPE_MISMATCH);

    for (sa_matrix* x : {s, t, r, mx, k}) sa_matrix_free(x);
    sa_mesh_free(line);
    sa_mesh_free(mesh);
}

TEST(CApi, BenchReport)
{
    const sa_variant vs[] = {SA_VARIANT_OPTV2, SA_VARIANT_OPTV, SA_VARIANT_OPTVS};
    const int64_t refine[] = {2, 3};
    sa_bench_config cfg;
    sa_bench_config_init(&cfg);
    cfg.matrix = SA_MATRIX_ELASTIC;
    cfg.d = 3;
    cfg.variants = vs;
    cfg.num_variants = 3;
    cfg.refine = refine;
    cfg.num_refine = 2;
    cfg.mode = SA_BENCH_MEMORY;
    sa_bench_report* rep = nullptr;
    ASSERT_EQ(sa_bench_run(&cfg, &rep), SA_OK);
    EXPECT_EQ(sa_bench_report_size(rep), 6u);
    EXPECT_EQ(sa_bench_report_memory_ratio(rep), 144.0);
    sa_bench_record rec;
    ASSERT_EQ(sa_bench_report_record(rep, 0, &rec), SA_OK);
    EXPECT_EQ(rec.variant, SA_VARIANT_OPTV2);
    EXPECT_EQ(rec.ndof, 81);
    EXPECT_EQ(sa_bench_report_record(rep, 6, &rec), SA_ERR_INDEX_OUT_OF_RANGE);
    const std::string csv = sa_bench_report_table(rep, SA_FORMAT_CSV);
    EXPECT_EQ(csv.rfind("variant,matrix,d,ndof,nme", 0), 0u);
    EXPECT_NE(std::string(sa_bench_report_summary(rep)).find("144"), std::string::npos);
    sa_bench_report_free(rep);

    cfg.mode = SA_BENCH_VERIFY;
    cfg.parallel_verify = 1;
    ASSERT_EQ(sa_bench_run(&cfg, &rep), SA_OK);
    EXPECT_EQ(sa_bench_report_verified(rep), 1);
    EXPECT_LE(sa_bench_report_worst_rel_diff(rep), 1e-12);
    sa_bench_report_free(rep);

    cfg.d = 1;
    EXPECT_EQ(sa_bench_run(&cfg, &rep), SA_ERR_INVALID_ARGUMENT);
    cfg.d = 3;
    cfg.variants = nullptr;
    EXPECT_EQ(sa_bench_run(&cfg, &rep), SA_ERR_INVALID_ARGUMENT);
}
