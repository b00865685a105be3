#include "simplex_asm/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

namespace simplex_asm {

SparseMatrix make_unchecked(Index nrows, Index ncols, std::vector<Index> row_ptr,
                            std::vector<Index> col_idx, std::vector<double> vals)
{
    SparseMatrix m;
    m.nrows_ = nrows;
    m.ncols_ = ncols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.vals_ = std::move(vals);
    return m;
}

SparseMatrix::SparseMatrix(Index nrows, Index ncols)
    : nrows_(nrows), ncols_(ncols), row_ptr_(static_cast<std::size_t>(nrows) + 1, 0)
{
    if (nrows < 0 || ncols < 0) {
        throw Error(ErrorCode::invalid_argument, "negative matrix dimension");
    }
}

SparseMatrix::SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_ptr,
                           std::vector<Index> col_idx, std::vector<double> vals)
    : nrows_(nrows), ncols_(ncols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      vals_(std::move(vals))
{
    if (row_ptr_.size() != static_cast<std::size_t>(nrows) + 1 || col_idx_.size() != vals_.size() ||
        row_ptr_.front() != 0 || row_ptr_.back() != static_cast<Index>(vals_.size())) {
        throw Error(ErrorCode::shape_mismatch, "inconsistent CSR arrays");
    }
    if (!is_canonical()) {
        throw Error(ErrorCode::invalid_argument, "CSR arrays are not in canonical form");
    }
}

bool SparseMatrix::is_canonical() const
{
    for (Index i = 0; i < nrows_; ++i) {
        const Index b = row_ptr_[static_cast<std::size_t>(i)];
        const Index e = row_ptr_[static_cast<std::size_t>(i) + 1];
        if (e < b) {
            return false;
        }
        for (Index p = b; p < e; ++p) {
            const Index c = col_idx_[static_cast<std::size_t>(p)];
            if (c < 0 || c >= ncols_ || vals_[static_cast<std::size_t>(p)] == 0.0) {
                return false;
            }
            if (p > b && col_idx_[static_cast<std::size_t>(p) - 1] >= c) {
                return false;
            }
        }
    }
    return true;
}

double SparseMatrix::coeff(Index i, Index j) const
{
    const auto b = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i)];
    const auto e = col_idx_.begin() + row_ptr_[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) {
        return 0.0;
    }
    return vals_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double SparseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : vals_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double SparseMatrix::norm_inf() const
{
    double m = 0.0;
    for (Index i = 0; i < nrows_; ++i) {
        double s = 0.0;
        for (Index p = row_ptr_[static_cast<std::size_t>(i)];
             p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
            s += std::abs(vals_[static_cast<std::size_t>(p)]);
        }
        m = std::max(m, s);
    }
    return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(ncols_)) {
        throw Error(ErrorCode::shape_mismatch, "vector length does not match matrix columns");
    }
    std::vector<double> y(static_cast<std::size_t>(nrows_), 0.0);
    for (Index i = 0; i < nrows_; ++i) {
        double s = 0.0;
        for (Index p = row_ptr_[static_cast<std::size_t>(i)];
             p < row_ptr_[static_cast<std::size_t>(i) + 1]; ++p) {
            s += vals_[static_cast<std::size_t>(p)] *
                 x[static_cast<std::size_t>(col_idx_[static_cast<std::size_t>(p)])];
        }
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

namespace {

// Counting-sort transpose of raw CSR arrays.  Output rows come out with sorted columns
// regardless of the input order, which is what the canonicalisation relies on.
// Sorts one merged row by column.  Columns are distinct, so the result is unique.  Mesh rows
// are short, where insertion sort beats a general sort and stays in cache.
void sort_row(Index* ci, double* vx, std::size_t len, std::vector<std::pair<Index, double>>& scratch)
{
    if (len <= 32) {
        for (std::size_t p = 1; p < len; ++p) {
            const Index c = ci[p];
            const double v = vx[p];
            std::size_t q = p;
            for (; q > 0 && ci[q - 1] > c; --q) {
                ci[q] = ci[q - 1];
                vx[q] = vx[q - 1];
            }
            ci[q] = c;
            vx[q] = v;
        }
        return;
    }
    scratch.resize(len);
    for (std::size_t p = 0; p < len; ++p) scratch[p] = {ci[p], vx[p]};
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t p = 0; p < len; ++p) {
        ci[p] = scratch[p].first;
        vx[p] = scratch[p].second;
    }
}

void transpose_csr(Index nrows, Index ncols, const std::vector<Index>& rp,
                   const std::vector<Index>& ci, const std::vector<double>& vx,
                   std::vector<Index>& out_rp, std::vector<Index>& out_ci,
                   std::vector<double>& out_vx)
{
    const auto nnz = static_cast<std::size_t>(rp[static_cast<std::size_t>(nrows)]);
    out_rp.assign(static_cast<std::size_t>(ncols) + 1, 0);
    out_ci.resize(nnz);
    out_vx.resize(nnz);
    for (std::size_t p = 0; p < nnz; ++p) {
        ++out_rp[static_cast<std::size_t>(ci[p]) + 1];
    }
    for (Index j = 0; j < ncols; ++j) {
        out_rp[static_cast<std::size_t>(j) + 1] += out_rp[static_cast<std::size_t>(j)];
    }
    std::vector<Index> next(out_rp.begin(), out_rp.end() - 1);
    for (Index i = 0; i < nrows; ++i) {
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i) + 1];
             ++p) {
            const auto dst = static_cast<std::size_t>(next[static_cast<std::size_t>(ci[static_cast<std::size_t>(p)])]++);
            out_ci[dst] = i;
            out_vx[dst] = vx[static_cast<std::size_t>(p)];
        }
    }
}

} // namespace

SparseMatrix sparse_from_triplets(Index nrows, Index ncols, std::span<const Index> rows,
                                  std::span<const Index> cols, std::span<const double> vals)
{
    if (nrows < 0 || ncols < 0) {
        throw Error(ErrorCode::invalid_argument, "negative matrix dimension");
    }
    if (rows.size() != cols.size() || rows.size() != vals.size()) {
        throw Error(ErrorCode::shape_mismatch, "triplet arrays have different lengths");
    }
    const std::size_t n = vals.size();
    for (std::size_t p = 0; p < n; ++p) {
        if (rows[p] < 0 || rows[p] >= nrows || cols[p] < 0 || cols[p] >= ncols) {
            throw Error(ErrorCode::index_out_of_range,
                        "triplet " + std::to_string(p) + " (" + std::to_string(rows[p]) + ", " +
                            std::to_string(cols[p]) + ") outside " + std::to_string(nrows) + "x" +
                            std::to_string(ncols));
        }
    }

    // Stable bucket by row, skipping exact zeros.
    std::vector<Index> rp(static_cast<std::size_t>(nrows) + 1, 0);
    for (std::size_t p = 0; p < n; ++p) {
        if (vals[p] != 0.0) {
            ++rp[static_cast<std::size_t>(rows[p]) + 1];
        }
    }
    for (Index i = 0; i < nrows; ++i) {
        rp[static_cast<std::size_t>(i) + 1] += rp[static_cast<std::size_t>(i)];
    }
    const auto kept = static_cast<std::size_t>(rp[static_cast<std::size_t>(nrows)]);
    std::vector<Index> ci(kept);
    std::vector<double> vx(kept);
    {
        std::vector<Index> next(rp.begin(), rp.end() - 1);
        for (std::size_t p = 0; p < n; ++p) {
            if (vals[p] != 0.0) {
                const auto dst = static_cast<std::size_t>(next[static_cast<std::size_t>(rows[p])]++);
                ci[dst] = cols[p];
                vx[dst] = vals[p];
            }
        }
    }

    // Merge duplicates within each row, in order of appearance.  marker[j] holds the slot of
    // column j inside the current row.
    std::vector<Index> marker(static_cast<std::size_t>(ncols), -1);
    std::vector<Index> crp(static_cast<std::size_t>(nrows) + 1, 0);
    std::vector<std::pair<Index, double>> scratch;
    std::size_t out = 0;
    for (Index i = 0; i < nrows; ++i) {
        const std::size_t row_start = out;
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i) + 1];
             ++p) {
            const auto j = static_cast<std::size_t>(ci[static_cast<std::size_t>(p)]);
            const Index slot = marker[j];
            if (slot >= static_cast<Index>(row_start)) {
                vx[static_cast<std::size_t>(slot)] += vx[static_cast<std::size_t>(p)];
            } else {
                marker[j] = static_cast<Index>(out);
                ci[out] = ci[static_cast<std::size_t>(p)];
                vx[out] = vx[static_cast<std::size_t>(p)];
                ++out;
            }
        }
        // Drop cancelled sums.
        std::size_t w = row_start;
        for (std::size_t p = row_start; p < out; ++p) {
            if (vx[p] != 0.0) {
                ci[w] = ci[p];
                vx[w] = vx[p];
                marker[static_cast<std::size_t>(ci[w])] = static_cast<Index>(w);
                ++w;
            } else {
                marker[static_cast<std::size_t>(ci[p])] = -1;
            }
        }
        out = w;
        sort_row(ci.data() + row_start, vx.data() + row_start, out - row_start, scratch);
        crp[static_cast<std::size_t>(i) + 1] = static_cast<Index>(out);
    }
    ci.resize(out);
    vx.resize(out);
    return make_unchecked(nrows, ncols, std::move(crp), std::move(ci), std::move(vx));
}

SparseMatrix sparse_from_triplets(const TripletBatch& t)
{
    return sparse_from_triplets(t.nrows, t.ncols, t.rows, t.cols, t.vals);
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::shape_mismatch, "add: shapes differ");
    }
    const auto arp = a.row_ptr(), brp = b.row_ptr();
    const auto aci = a.col_idx(), bci = b.col_idx();
    const auto avx = a.values(), bvx = b.values();
    std::vector<Index> rp(static_cast<std::size_t>(a.rows()) + 1, 0);
    std::vector<Index> ci;
    std::vector<double> vx;
    ci.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    vx.reserve(static_cast<std::size_t>(a.nnz() + b.nnz()));
    for (Index i = 0; i < a.rows(); ++i) {
        auto p = static_cast<std::size_t>(arp[static_cast<std::size_t>(i)]);
        auto q = static_cast<std::size_t>(brp[static_cast<std::size_t>(i)]);
        const auto pe = static_cast<std::size_t>(arp[static_cast<std::size_t>(i) + 1]);
        const auto qe = static_cast<std::size_t>(brp[static_cast<std::size_t>(i) + 1]);
        while (p < pe || q < qe) {
            Index c;
            double v;
            if (q >= qe || (p < pe && aci[p] < bci[q])) {
                c = aci[p];
                v = avx[p++];
            } else if (p >= pe || bci[q] < aci[p]) {
                c = bci[q];
                v = bvx[q++];
            } else {
                c = aci[p];
                v = avx[p++] + bvx[q++];
            }
            if (v != 0.0) {
                ci.push_back(c);
                vx.push_back(v);
            }
        }
        rp[static_cast<std::size_t>(i) + 1] = static_cast<Index>(ci.size());
    }
    return make_unchecked(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(vx));
}

SparseMatrix transpose(const SparseMatrix& a)
{
    std::vector<Index> rp(a.row_ptr().begin(), a.row_ptr().end());
    std::vector<Index> ci(a.col_idx().begin(), a.col_idx().end());
    std::vector<double> vx(a.values().begin(), a.values().end());
    std::vector<Index> trp, tci;
    std::vector<double> tvx;
    transpose_csr(a.rows(), a.cols(), rp, ci, vx, trp, tci, tvx);
    return make_unchecked(a.cols(), a.rows(), std::move(trp), std::move(tci), std::move(tvx));
}

double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::shape_mismatch, "max_abs_diff: shapes differ");
    }
    const auto arp = a.row_ptr(), brp = b.row_ptr();
    const auto aci = a.col_idx(), bci = b.col_idx();
    const auto avx = a.values(), bvx = b.values();
    double m = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        auto p = static_cast<std::size_t>(arp[static_cast<std::size_t>(i)]);
        auto q = static_cast<std::size_t>(brp[static_cast<std::size_t>(i)]);
        const auto pe = static_cast<std::size_t>(arp[static_cast<std::size_t>(i) + 1]);
        const auto qe = static_cast<std::size_t>(brp[static_cast<std::size_t>(i) + 1]);
        while (p < pe || q < qe) {
            double diff;
            if (q >= qe || (p < pe && aci[p] < bci[q])) {
                diff = avx[p++];
            } else if (p >= pe || bci[q] < aci[p]) {
                diff = bvx[q++];
            } else {
                diff = avx[p++] - bvx[q++];
            }
            m = std::max(m, std::abs(diff));
        }
    }
    return m;
}

void write_matrixmarket(const SparseMatrix& a, const std::filesystem::path& path)
{
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) {
        throw Error(ErrorCode::io_error, "cannot write " + path.string());
    }
    std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(f, "%lld %lld %lld\n", static_cast<long long>(a.rows()),
                 static_cast<long long>(a.cols()), static_cast<long long>(a.nnz()));
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto vx = a.values();
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i) + 1];
             ++p) {
            std::fprintf(f, "%lld %lld %.17g\n", static_cast<long long>(i + 1),
                         static_cast<long long>(ci[static_cast<std::size_t>(p)] + 1),
                         vx[static_cast<std::size_t>(p)]);
        }
    }
    const bool ok = std::ferror(f) == 0;
    std::fclose(f);
    if (!ok) {
        throw Error(ErrorCode::io_error, "write failed for " + path.string());
    }
}

SparseMatrix read_matrixmarket(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::parse_error, "empty MatrixMarket file");
    }
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        auto lower = [](std::string s) {
            for (auto& c : s) {
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
            return s;
        };
        if (banner != "%%MatrixMarket" || lower(object) != "matrix" ||
            lower(format) != "coordinate" || lower(field) != "real" ||
            lower(symmetry) != "general") {
            throw Error(ErrorCode::parse_error,
                        "unsupported header, expected 'matrix coordinate real general'");
        }
    }
    std::size_t lineno = 1;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '%') {
                return true;
            }
        }
        return false;
    };
    if (!next_line()) {
        throw Error(ErrorCode::parse_error, "missing size line");
    }
    long long nr = -1, nc = -1, nz = -1;
    {
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> nr >> nc >> nz) || (ss >> extra) || nr < 0 || nc < 0 || nz < 0) {
            throw Error(ErrorCode::parse_error, "malformed size line");
        }
    }
    TripletBatch t;
    t.nrows = nr;
    t.ncols = nc;
    t.reserve(static_cast<std::size_t>(nz));
    for (long long e = 0; e < nz; ++e) {
        if (!next_line()) {
            throw Error(ErrorCode::parse_error, "unexpected end of file after " +
                                                    std::to_string(e) + " entries");
        }
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 0.0;
        std::string extra;
        if (!(ss >> i >> j >> v) || (ss >> extra)) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": malformed entry");
        }
        if (i < 1 || i > nr || j < 1 || j > nc) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) +
                                                    ": one-based index out of range");
        }
        t.push(i - 1, j - 1, v);
    }
    if (next_line()) {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": trailing data");
    }
    return sparse_from_triplets(t);
}

} // namespace simplex_asm
