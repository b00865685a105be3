// simplex-asm: benchmark and assembly front end over the C API.
//
// Exit codes: 0 success, 1 verification failure or runtime error, 2 usage error.

#include "simplex_asm/simplex_asm.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError {
    std::string message;
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int64_t> parse_refine(const std::string& s)
{
    std::vector<int64_t> out;
    for (const auto& tok : split_list(s)) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            throw UsageError{"--refine: '" + tok + "' is not an integer"};
        }
        if (pos != tok.size() || v < 1) throw UsageError{"--refine: '" + tok + "' must be a positive integer"};
        out.push_back(v);
    }
    if (out.empty()) throw UsageError{"--refine: empty list"};
    return out;
}

sa_matrix_kind parse_kind(const std::string& s)
{
    sa_matrix_kind k;
    if (sa_matrix_kind_from_name(s.c_str(), &k) != SA_OK) throw UsageError{sa_last_error()};
    return k;
}

sa_variant parse_one_variant(const std::string& s)
{
    sa_variant v;
    if (sa_variant_from_name(s.c_str(), &v) != SA_OK) throw UsageError{sa_last_error()};
    return v;
}

int report_status(sa_status st)
{
    std::cerr << "simplex-asm: " << sa_status_string(st) << ": " << sa_last_error() << "\n";
    return st == SA_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

struct BenchArgs {
    std::string matrix;
    int dim = 0;
    int order = 2;
    std::string variants;
    std::string refine;
    int reps = 5;
    std::string mode = "time";
    std::string out;
    std::string format = "csv";
    bool parallel_verify = false;
};

int run_bench(const BenchArgs& a)
{
    sa_bench_config cfg;
    sa_bench_config_init(&cfg);
    cfg.matrix = parse_kind(a.matrix);
    cfg.d = a.dim;
    cfg.order = a.order;
    std::vector<sa_variant> variants;
    for (const auto& name : split_list(a.variants)) variants.push_back(parse_one_variant(name));
    if (variants.empty()) throw UsageError{"--variants: empty list"};
    const auto refine = parse_refine(a.refine);
    cfg.variants = variants.data();
    cfg.num_variants = variants.size();
    cfg.refine = refine.data();
    cfg.num_refine = refine.size();
    cfg.reps = a.reps;
    if (sa_bench_mode_from_name(a.mode.c_str(), &cfg.mode) != SA_OK) throw UsageError{sa_last_error()};
    cfg.parallel_verify = a.parallel_verify ? 1 : 0;

    sa_bench_report* report = nullptr;
    const sa_status st = sa_bench_run(&cfg, &report);
    if (st != SA_OK) return report_status(st);

    const auto format = a.format == "md" ? SA_FORMAT_MD : SA_FORMAT_CSV;
    const char* table = sa_bench_report_table(report, format);
    int rc = kExitOk;
    if (a.out.empty() || a.out == "-") {
        std::cout << table;
    } else {
        std::ofstream f(a.out);
        f << table;
        if (!f) {
            std::cerr << "simplex-asm: cannot write " << a.out << "\n";
            rc = kExitFailure;
        }
    }
    std::cerr << sa_bench_report_summary(report);
    if (cfg.mode == SA_BENCH_VERIFY && !sa_bench_report_verified(report)) rc = kExitFailure;
    sa_bench_report_free(report);
    return rc;
}

struct AssembleArgs {
    std::string mesh;
    std::string matrix;
    std::string variant = "optvs";
    int order = 1;
    std::string weight = "one";
    double lambda = 1.0;
    double mu = 1.0;
    std::string out;
};

int run_assemble(const AssembleArgs& a)
{
    sa_assemble_options opts;
    sa_assemble_options_init(&opts);
    opts.matrix = parse_kind(a.matrix);
    opts.variant = parse_one_variant(a.variant);
    opts.order = a.order;
    opts.weight_x1 = a.weight == "x1" ? 1 : 0;
    opts.lambda = a.lambda;
    opts.mu = a.mu;

    sa_mesh* mesh = nullptr;
    sa_status st = sa_mesh_read(a.mesh.c_str(), &mesh);
    if (st != SA_OK) return report_status(st);
    sa_matrix* m = nullptr;
    st = sa_assemble(mesh, &opts, &m);
    sa_mesh_free(mesh);
    if (st != SA_OK) return report_status(st);
    st = sa_matrix_write_mm(m, a.out.c_str());
    int64_t nrows = 0, nnz = 0;
    sa_matrix_info(m, &nrows, nullptr, &nnz);
    sa_matrix_free(m);
    if (st != SA_OK) return report_status(st);
    std::cerr << "wrote " << a.out << ": " << nrows << " rows, " << nnz << " nonzeros\n";
    return kExitOk;
}

struct MeshArgs {
    int dim = 0;
    int64_t n = 0;
    std::string out;
};

int run_mesh(const MeshArgs& a)
{
    sa_mesh* mesh = nullptr;
    sa_status st = sa_mesh_hypercube(a.dim, a.n, &mesh);
    if (st != SA_OK) return report_status(st);
    st = sa_mesh_write(mesh, a.out.c_str());
    sa_mesh_free(mesh);
    if (st != SA_OK) return report_status(st);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse finite element matrix assembly on simplex meshes"};
    app.require_subcommand(1);

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Time, verify or size the assembly strategies on hypercube meshes");
    b->add_option("--matrix", bench.matrix, "mass | stiffness | elastic | mass-pk")->required();
    b->add_option("--dim", bench.dim, "Space dimension")->required()->check(CLI::Range(1, 3));
    b->add_option("--order", bench.order, "Polynomial order for mass-pk")->check(CLI::Range(1, 6));
    b->add_option("--variants", bench.variants, "Comma separated: base,optv1,optv2,optv,optvs")->required();
    b->add_option("--refine", bench.refine, "Comma separated subdivisions per axis")->required();
    b->add_option("--reps", bench.reps, "Repetitions per measurement")->check(CLI::PositiveNumber);
    b->add_option("--mode", bench.mode, "time | verify | memory");
    b->add_option("--out", bench.out, "Output table path ('-' for stdout)")->required();
    b->add_option("--format", bench.format, "csv | md")->check(CLI::IsMember({"csv", "md"}));
    b->add_flag("--parallel-verify", bench.parallel_verify, "Assemble variants concurrently in verify mode");

    AssembleArgs asmb;
    auto* s = app.add_subcommand("assemble", "Assemble one matrix from a mesh file into MatrixMarket format");
    s->add_option("--mesh", asmb.mesh, "Mesh file")->required();
    s->add_option("--matrix", asmb.matrix, "mass | stiffness | elastic | mass-pk")->required();
    s->add_option("--variant", asmb.variant, "Assembly strategy");
    s->add_option("--order", asmb.order, "Polynomial order for mass-pk")->check(CLI::Range(1, 6));
    s->add_option("--weight", asmb.weight, "Mass weight: one | x1")->check(CLI::IsMember({"one", "x1"}));
    s->add_option("--lambda", asmb.lambda, "Constant first Lame parameter");
    s->add_option("--mu", asmb.mu, "Constant second Lame parameter");
    s->add_option("--out", asmb.out, "MatrixMarket output path")->required();

    MeshArgs mesh;
    auto* m = app.add_subcommand("mesh", "Write the Kuhn triangulation of the unit hypercube");
    m->add_option("--dim", mesh.dim, "Space dimension")->required()->check(CLI::Range(1, 3));
    m->add_option("--n", mesh.n, "Subdivisions per axis")->required()->check(CLI::PositiveNumber);
    m->add_option("--out", mesh.out, "Mesh output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (b->parsed()) return run_bench(bench);
        if (s->parsed()) return run_assemble(asmb);
        if (m->parsed()) return run_mesh(mesh);
    } catch (const UsageError& e) {
        std::cerr << "simplex-asm: " << e.message << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
