#include "simplex_asm/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace simplex_asm;

namespace {

BenchConfig config(MatrixKind kind, int d, std::vector<Variant> vs, std::vector<Index> refine, BenchMode mode)
{
    BenchConfig c;
    c.matrix = kind;
    c.d = d;
    c.variants = std::move(vs);
    c.refine = std::move(refine);
    c.mode = mode;
    c.reps = 3;
    return c;
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

ErrorCode config_error(const BenchConfig& c)
{
    try {
        validate_config(c);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "config accepted";
    return ErrorCode::io_error;
}

} // namespace

TEST(BenchConfig, Validation)
{
    auto ok = config(MatrixKind::stiffness, 2, {Variant::optv}, {4}, BenchMode::time);
    EXPECT_NO_THROW(validate_config(ok));
    auto c = ok;
    c.matrix = MatrixKind::elastic;
    c.d = 1;
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
    c = ok;
    c.d = 4;
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
    c = ok;
    c.reps = 2;
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
    c.mode = BenchMode::verify;
    EXPECT_NO_THROW(validate_config(c));
    c = ok;
    c.variants.clear();
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
    c = ok;
    c.refine = {4, 0};
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
    c = ok;
    c.matrix = MatrixKind::mass_pk;
    c.order = 7;
    EXPECT_EQ(config_error(c), ErrorCode::invalid_argument);
}

TEST(BenchModes, NamesRoundTrip)
{
    for (BenchMode m : {BenchMode::time, BenchMode::verify, BenchMode::memory}) {
        EXPECT_EQ(parse_bench_mode(bench_mode_name(m)), m);
    }
    EXPECT_FALSE(parse_bench_mode("fast").has_value());
}

TEST(RunBench, TimeModeRecords)
{
    const auto c = config(MatrixKind::stiffness, 2, {Variant::optv, Variant::optvs}, {32, 64}, BenchMode::time);
    const BenchReport r = run_bench(c);
    ASSERT_EQ(r.records.size(), 4u);
    for (const auto& rec : r.records) {
        EXPECT_GT(rec.time_median_s, 0.0);
        EXPECT_GT(rec.time_mean_s, 0.0);
        EXPECT_LE(rec.time_min_s, rec.time_median_s);
        EXPECT_GE(rec.time_max_s, rec.time_median_s);
        if (rec.variant == Variant::optvs) {
            EXPECT_EQ(rec.speedup, 1.0);
        }
    }
    EXPECT_EQ(r.records[0].ndof, 33 * 33);
    EXPECT_EQ(r.records[2].ndof, 65 * 65);
    EXPECT_TRUE(std::isnan(r.records[0].slope));
    EXPECT_TRUE(std::isfinite(r.records[2].slope));
    EXPECT_TRUE(std::isfinite(r.records[3].slope));
    // Coarse sanity only; the acceptance suite checks the slope band on larger meshes.
    EXPECT_GT(r.records[3].slope, 0.3);
    EXPECT_LT(r.records[3].slope, 2.5);
}

TEST(RunBench, ReferenceIsSlowestWithoutOptvs)
{
    const auto c = config(MatrixKind::mass, 2, {Variant::optv2, Variant::optv}, {16}, BenchMode::time);
    const BenchReport r = run_bench(c);
    ASSERT_EQ(r.records.size(), 2u);
    const double lo = std::min(r.records[0].speedup, r.records[1].speedup);
    const double hi = std::max(r.records[0].speedup, r.records[1].speedup);
    EXPECT_EQ(hi, 1.0);
    EXPECT_LE(lo, 1.0);
}

TEST(RunBench, SubMillisecondWarning)
{
    const auto c = config(MatrixKind::stiffness, 1, {Variant::optvs}, {2}, BenchMode::time);
    const BenchReport r = run_bench(c);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings[0].find("1 ms"), std::string::npos);
}

TEST(RunBench, VerifyModeAllMatrices)
{
    struct Case {
        MatrixKind kind;
        int d;
        std::vector<Index> refine;
    };
    const std::vector<Case> cases{{MatrixKind::mass, 1, {5, 9}},
                                  {MatrixKind::stiffness, 2, {3, 6}},
                                  {MatrixKind::elastic, 3, {2}},
                                  {MatrixKind::mass_pk, 2, {3}}};
    for (const auto& cs : cases) {
        auto c = config(cs.kind, cs.d, std::vector<Variant>(std::begin(kAllVariants), std::end(kAllVariants)),
                        cs.refine, BenchMode::verify);
        const BenchReport r = run_bench(c);
        EXPECT_TRUE(r.verified) << matrix_kind_name(cs.kind);
        EXPECT_LE(r.worst_rel_diff, kVerifyTolerance);
        EXPECT_EQ(r.records.size(), 5 * cs.refine.size());
        c.parallel_verify = true;
        const BenchReport p = run_bench(c);
        EXPECT_EQ(p.worst_rel_diff, r.worst_rel_diff);
        EXPECT_NE(summarize(r, c).find("PASS"), std::string::npos);
    }
}

TEST(RunBench, MemoryModeElastic3d)
{
    const auto c = config(MatrixKind::elastic, 3, {Variant::optv2, Variant::optv, Variant::optvs}, {2, 3},
                          BenchMode::memory);
    const BenchReport a = run_bench(c);
    const BenchReport b = run_bench(c);
    EXPECT_EQ(a.optv2_to_optv_memory_ratio, 144.0);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].aux_bytes, b.records[i].aux_bytes);
    EXPECT_EQ(a.records[0].aux_bytes, 3u * 144u * 48u * 8u);
    EXPECT_EQ(a.records[0].speedup, 144.0);
    EXPECT_NE(summarize(a, c).find("144"), std::string::npos);
}

TEST(EmitTable, CsvShapes)
{
    const std::string header = "variant,matrix,d,ndof,nme,time_mean_s,time_median_s,aux_bytes,speedup";
    const auto empty = lines(emit_table({}, TableFormat::csv));
    ASSERT_EQ(empty.size(), 1u);
    EXPECT_EQ(empty[0], header);

    BenchRecord r;
    r.variant = Variant::optvs;
    r.matrix = MatrixKind::stiffness;
    r.d = 2;
    r.ndof = 81;
    r.nme = 128;
    r.time_mean_s = 1.5e-3;
    r.time_median_s = 1.25e-3;
    r.aux_bytes = 3072;
    r.speedup = 1.0;
    const auto one = lines(emit_table({r}, TableFormat::csv));
    ASSERT_EQ(one.size(), 2u);
    EXPECT_EQ(one[1], "optvs,stiffness,2,81,128,1.500000e-03,1.250000e-03,3072,1.00");
}

TEST(EmitTable, MarkdownTimeOverSpeedup)
{
    BenchRecord a;
    a.variant = Variant::optv;
    a.ndof = 10;
    a.time_median_s = 2.0;
    a.speedup = 2.0;
    BenchRecord b = a;
    b.variant = Variant::optvs;
    b.time_median_s = 1.0;
    b.speedup = 1.0;
    const auto md = lines(emit_table({a, b}, TableFormat::md));
    ASSERT_EQ(md.size(), 4u);
    EXPECT_EQ(md[0], "| ndof | optv | optvs |");
    EXPECT_EQ(md[2], "| 10 | 2 | 1 |");
    EXPECT_EQ(md[3], "| | *x2.00* | *x1.00* |");
}

TEST(LogLogSlope, PowerLaws)
{
    const std::vector<double> n{100, 400, 1600, 6400};
    std::vector<double> t1, t15;
    for (double x : n) t1.push_back(3e-6 * x), t15.push_back(1e-7 * std::pow(x, 1.5));
    EXPECT_NEAR(loglog_slope(n, t1), 1.0, 1e-12);
    EXPECT_NEAR(loglog_slope(n, t15), 1.5, 1e-12);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), Error);
    EXPECT_THROW(loglog_slope({1.0, 2.0}, {1.0}), Error);
}

TEST(RunBench, MemoryReferenceIsSmallestFootprint)
{
    const auto c = config(MatrixKind::elastic, 3, {Variant::optv2, Variant::optv}, {2}, BenchMode::memory);
    const BenchReport r = run_bench(c);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[0].speedup, 144.0);
    EXPECT_EQ(r.records[1].speedup, 1.0);
    const auto md = lines(emit_table(r.records, TableFormat::md, BenchMode::memory));
    ASSERT_EQ(md.size(), 4u);
    EXPECT_EQ(md[2], "| 81 | " + std::to_string(r.records[0].aux_bytes) + " | " +
                         std::to_string(r.records[1].aux_bytes) + " |");
    EXPECT_EQ(md[3], "| | *x144.00* | *x1.00* |");
}
