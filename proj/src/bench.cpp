#include "simplex_asm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace simplex_asm {

std::string_view bench_mode_name(BenchMode mode)
{
    switch (mode) {
    case BenchMode::time: return "time";
    case BenchMode::verify: return "verify";
    case BenchMode::memory: return "memory";
    }
    return "unknown";
}

std::optional<BenchMode> parse_bench_mode(std::string_view name)
{
    for (BenchMode m : {BenchMode::time, BenchMode::verify, BenchMode::memory}) {
        if (bench_mode_name(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

void validate_config(const BenchConfig& config)
{
    if (config.d < 1 || config.d > 3) {
        throw Error(ErrorCode::invalid_argument, "bench dimension must be 1, 2 or 3");
    }
    if (config.matrix == MatrixKind::elastic && config.d == 1) {
        throw Error(ErrorCode::invalid_argument, "elastic matrix requires d = 2 or 3");
    }
    if (config.matrix == MatrixKind::mass_pk && (config.order < 1 || config.order > 6)) {
        throw Error(ErrorCode::invalid_argument, "mass-pk order must be in [1, 6]");
    }
    if (config.variants.empty()) {
        throw Error(ErrorCode::invalid_argument, "at least one variant is required");
    }
    if (config.refine.empty()) {
        throw Error(ErrorCode::invalid_argument, "at least one refinement is required");
    }
    for (Index n : config.refine) {
        if (n < 1) {
            throw Error(ErrorCode::invalid_argument, "refinements must be >= 1");
        }
    }
    if (config.mode == BenchMode::time && config.reps < 3) {
        throw Error(ErrorCode::invalid_argument, "timing needs at least 3 repetitions");
    }
    // Every matrix kind exposed here is symmetric, so optvs is always admissible.
}

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double seconds_of(const PreparedProblem& problem, Variant v)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = problem.assemble(v);
    const auto t1 = std::chrono::steady_clock::now();
    // Keep the result observable so the work cannot be elided.
    if (m.nnz() < 0) {
        std::abort();
    }
    return std::chrono::duration<double>(t1 - t0).count();
}

ProblemSpec spec_for(const BenchConfig& config)
{
    ProblemSpec spec;
    spec.kind = config.matrix;
    spec.order = config.order;
    return spec;
}

Variant reference_variant(const BenchConfig& config, const std::vector<BenchRecord>& recs,
                          bool by_time)
{
    for (Variant v : config.variants) {
        if (v == Variant::optvs) {
            return v;
        }
    }
    // Time: the slowest variant.  Memory: the smallest footprint, so ratios read as "x times more".
    const BenchRecord* pick = &recs.front();
    for (const auto& r : recs) {
        if (by_time ? r.time_median_s > pick->time_median_s : r.aux_bytes < pick->aux_bytes) {
            pick = &r;
        }
    }
    return pick->variant;
}

} // namespace

BenchReport run_bench(const BenchConfig& config)
{
    validate_config(config);
    BenchReport report;
    std::map<Variant, BenchRecord> previous;

    for (Index n : config.refine) {
        const Mesh mesh = generate_hypercube_mesh(config.d, n);
        const PreparedProblem problem(mesh, spec_for(config));
        std::vector<BenchRecord> level;
        for (Variant v : config.variants) {
            BenchRecord r;
            r.variant = v;
            r.matrix = config.matrix;
            r.d = config.d;
            r.ndof = problem.ndof();
            r.nme = problem.num_elements();
            r.aux_bytes = auxiliary_bytes(v, r.nme, problem.local_dofs());
            r.slope = std::numeric_limits<double>::quiet_NaN();
            level.push_back(r);
        }

        if (config.mode == BenchMode::time) {
            for (auto& r : level) {
                seconds_of(problem, r.variant);  // warm-up
                std::vector<double> samples;
                for (int rep = 0; rep < config.reps; ++rep) {
                    samples.push_back(seconds_of(problem, r.variant));
                }
                r.time_median_s = median(samples);
                r.time_mean_s = 0.0;
                for (double s : samples) {
                    r.time_mean_s += s;
                }
                r.time_mean_s /= static_cast<double>(samples.size());
                r.time_min_s = *std::min_element(samples.begin(), samples.end());
                r.time_max_s = *std::max_element(samples.begin(), samples.end());
                if (r.time_median_s < 1e-3) {
                    report.warnings.push_back(
                        std::string(variant_name(r.variant)) + " at ndof=" +
                        std::to_string(r.ndof) +
                        ": median below 1 ms, timer resolution limits the measurement");
                }
                if (auto it = previous.find(r.variant); it != previous.end()) {
                    r.slope = std::log(r.time_median_s / it->second.time_median_s) /
                              std::log(static_cast<double>(r.ndof) /
                                       static_cast<double>(it->second.ndof));
                }
            }
            const Variant ref = reference_variant(config, level, true);
            const double ref_time =
                std::find_if(level.begin(), level.end(), [&](const auto& r) {
                    return r.variant == ref;
                })->time_median_s;
            for (auto& r : level) {
                r.speedup = r.variant == ref ? 1.0 : r.time_median_s / ref_time;
            }
        } else if (config.mode == BenchMode::verify) {
            std::vector<SparseMatrix> results(level.size());
            std::vector<std::string> errors(level.size());
            auto run_one = [&](std::size_t i) {
                try {
                    results[i] = problem.assemble(level[i].variant);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            };
            if (config.parallel_verify) {
                std::vector<std::thread> workers;
                for (std::size_t i = 0; i < level.size(); ++i) {
                    workers.emplace_back(run_one, i);
                }
                for (auto& w : workers) {
                    w.join();
                }
            } else {
                for (std::size_t i = 0; i < level.size(); ++i) {
                    run_one(i);
                }
            }
            for (std::size_t i = 0; i < errors.size(); ++i) {
                if (!errors[i].empty()) {
                    throw Error(ErrorCode::invalid_argument,
                                std::string(variant_name(level[i].variant)) + ": " + errors[i]);
                }
            }
            double scale = 0.0;
            for (const auto& m : results) {
                scale = std::max(scale, m.max_abs());
            }
            for (std::size_t i = 0; i < results.size(); ++i) {
                double worst = 0.0;
                for (std::size_t j = 0; j < results.size(); ++j) {
                    if (i != j) {
                        worst = std::max(worst, max_abs_diff(results[i], results[j]));
                    }
                }
                level[i].max_rel_diff = scale > 0.0 ? worst / scale : worst;
                level[i].speedup = 1.0;
                report.worst_rel_diff = std::max(report.worst_rel_diff, level[i].max_rel_diff);
            }
        } else {
            const Variant ref = reference_variant(config, level, false);
            const double ref_bytes = static_cast<double>(
                std::find_if(level.begin(), level.end(), [&](const auto& r) {
                    return r.variant == ref;
                })->aux_bytes);
            for (auto& r : level) {
                r.speedup = static_cast<double>(r.aux_bytes) / ref_bytes;
            }
            std::size_t v2 = 0, v = 0;
            for (const auto& r : level) {
                if (r.variant == Variant::optv2) v2 = r.aux_bytes;
                if (r.variant == Variant::optv) v = r.aux_bytes;
            }
            if (v2 != 0 && v != 0) {
                report.optv2_to_optv_memory_ratio = static_cast<double>(v2) / static_cast<double>(v);
            }
        }

        for (const auto& r : level) {
            previous[r.variant] = r;
            report.records.push_back(r);
        }
    }
    report.verified = report.worst_rel_diff <= kVerifyTolerance;
    return report;
}

namespace {

std::string fmt_double(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

std::string emit_table(const std::vector<BenchRecord>& records, TableFormat format, BenchMode mode)
{
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "variant,matrix,d,ndof,nme,time_mean_s,time_median_s,aux_bytes,speedup\n";
        for (const auto& r : records) {
            out << variant_name(r.variant) << ',' << matrix_kind_name(r.matrix) << ',' << r.d << ','
                << r.ndof << ',' << r.nme << ',' << fmt_double("%.6e", r.time_mean_s) << ','
                << fmt_double("%.6e", r.time_median_s) << ',' << r.aux_bytes << ','
                << fmt_double("%.2f", r.speedup) << '\n';
        }
        return out.str();
    }

    std::vector<Variant> variants;
    std::vector<Index> ndofs;
    for (const auto& r : records) {
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
            variants.push_back(r.variant);
        }
        if (std::find(ndofs.begin(), ndofs.end(), r.ndof) == ndofs.end()) {
            ndofs.push_back(r.ndof);
        }
    }
    out << "| ndof |";
    for (Variant v : variants) {
        out << ' ' << variant_name(v) << " |";
    }
    out << "\n|---:|";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        out << "---:|";
    }
    out << '\n';
    auto find = [&](Index ndof, Variant v) -> const BenchRecord* {
        for (const auto& r : records) {
            if (r.ndof == ndof && r.variant == v) {
                return &r;
            }
        }
        return nullptr;
    };
    for (Index ndof : ndofs) {
        out << "| " << ndof << " |";
        for (Variant v : variants) {
            const auto* r = find(ndof, v);
            const std::string cell = !r                        ? std::string("-")
                                     : mode == BenchMode::memory ? std::to_string(r->aux_bytes)
                                                                 : fmt_double("%.4g", r->time_median_s);
            out << ' ' << cell << " |";
        }
        out << "\n| |";
        for (Variant v : variants) {
            const auto* r = find(ndof, v);
            out << ' ' << (r ? "*x" + fmt_double("%.2f", r->speedup) + "*" : std::string("-"))
                << " |";
        }
        out << '\n';
    }
    return out.str();
}

double loglog_slope(const std::vector<double>& ndof, const std::vector<double>& seconds)
{
    if (ndof.size() != seconds.size() || ndof.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "slope fit needs at least two paired samples");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(ndof.size());
    for (std::size_t i = 0; i < ndof.size(); ++i) {
        const double x = std::log(ndof[i]);
        const double y = std::log(seconds[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string summarize(const BenchReport& report, const BenchConfig& config)
{
    std::ostringstream out;
    out << "matrix=" << matrix_kind_name(config.matrix) << " d=" << config.d
        << " mode=" << bench_mode_name(config.mode) << '\n';
    if (config.mode == BenchMode::time) {
        for (const auto& r : report.records) {
            const double jitter =
                r.time_median_s > 0 ? (r.time_max_s - r.time_min_s) / r.time_median_s : 0.0;
            out << "  " << variant_name(r.variant) << " ndof=" << r.ndof
                << " median=" << fmt_double("%.4e", r.time_median_s)
                << "s jitter=" << fmt_double("%.1f", 100.0 * jitter) << "%";
            if (!std::isnan(r.slope)) {
                out << " slope=" << fmt_double("%.3f", r.slope);
            }
            out << '\n';
        }
    } else if (config.mode == BenchMode::verify) {
        out << "  worst pairwise max_abs_diff / max|entry| = "
            << fmt_double("%.3e", report.worst_rel_diff) << " (tolerance "
            << fmt_double("%.0e", kVerifyTolerance) << "): "
            << (report.verified ? "PASS" : "FAIL") << '\n';
    } else {
        for (const auto& r : report.records) {
            out << "  " << variant_name(r.variant) << " nme=" << r.nme
                << " aux_bytes=" << r.aux_bytes << '\n';
        }
        if (report.optv2_to_optv_memory_ratio > 0) {
            out << "  optv2/optv auxiliary memory ratio = "
                << fmt_double("%.6g", report.optv2_to_optv_memory_ratio) << '\n';
        }
    }
    for (const auto& w : report.warnings) {
        out << "  warning: " << w << '\n';
    }
    return out.str();
}

} // namespace simplex_asm
