#pragma once

#include "simplex_asm/assembly.hpp"

#include <string>
#include <vector>

namespace simplex_asm {

enum class BenchMode { time, verify, memory };
enum class TableFormat { csv, md };

std::string_view bench_mode_name(BenchMode mode);
std::optional<BenchMode> parse_bench_mode(std::string_view name);

struct BenchConfig {
    MatrixKind matrix = MatrixKind::stiffness;
    int d = 2;
    int order = 2;  // mass-pk only
    std::vector<Variant> variants;
    std::vector<Index> refine;  // subdivisions per axis of the unit hypercube
    int reps = 5;
    BenchMode mode = BenchMode::time;
    bool parallel_verify = false;
};

/// Throws invalid_argument / contract_violation describing the first incompatibility.
void validate_config(const BenchConfig& config);

struct BenchRecord {
    Variant variant = Variant::optvs;
    MatrixKind matrix = MatrixKind::stiffness;
    int d = 0;
    Index ndof = 0;
    Index nme = 0;
    double time_mean_s = 0.0;
    double time_median_s = 0.0;
    double time_min_s = 0.0;
    double time_max_s = 0.0;
    std::size_t aux_bytes = 0;
    /// Time (or, in memory mode, auxiliary bytes) over that of the reference variant.
    double speedup = 1.0;
    /// log(t / t_prev) / log(ndof / ndof_prev) against the previous refinement; NaN for the
    /// first one and outside time mode.
    double slope = 0.0;
    /// Largest difference to the other variants at this refinement, relative to max |entry|.
    double max_rel_diff = 0.0;
};

struct BenchReport {
    std::vector<BenchRecord> records;
    std::vector<std::string> warnings;
    /// Verify mode: worst pairwise relative difference and the verdict at 1e-12.
    double worst_rel_diff = 0.0;
    bool verified = true;
    /// Memory mode, when both are present: optv2 bytes over optv bytes.
    double optv2_to_optv_memory_ratio = 0.0;
};

inline constexpr double kVerifyTolerance = 1e-12;

BenchReport run_bench(const BenchConfig& config);

/// CSV columns: variant,matrix,d,ndof,nme,time_mean_s,time_median_s,aux_bytes,speedup.
/// Markdown: one value row (median seconds, or aux bytes in memory mode) and one speedup row
/// per refinement, variants as columns.
std::string emit_table(const std::vector<BenchRecord>& records, TableFormat format,
                       BenchMode mode = BenchMode::time);

/// Least-squares slope of log(time) against log(ndof).
double loglog_slope(const std::vector<double>& ndof, const std::vector<double>& seconds);

/// Human-readable summary: slopes, jitter, warnings, verification or memory verdicts.
std::string summarize(const BenchReport& report, const BenchConfig& config);

} // namespace simplex_asm
