#pragma once

#include "simplex_asm/error.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace simplex_asm {

/// Coordinate-form contributions (the Ig / Jg / Kg arrays).  Duplicates are summed on
/// conversion.
struct TripletBatch {
    Index nrows = 0;
    Index ncols = 0;
    std::vector<Index> rows;
    std::vector<Index> cols;
    std::vector<double> vals;

    void reserve(std::size_t n)
    {
        rows.reserve(n);
        cols.reserve(n);
        vals.reserve(n);
    }
    void push(Index i, Index j, double v)
    {
        rows.push_back(i);
        cols.push_back(j);
        vals.push_back(v);
    }
    std::size_t size() const { return vals.size(); }
};

/// Compressed-row matrix in canonical form: strictly increasing columns per row and no
/// stored exact zeros.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(Index nrows, Index ncols);
    /// Takes ownership of CSR arrays; checks canonical form.
    SparseMatrix(Index nrows, Index ncols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                 std::vector<double> vals);

    Index rows() const { return nrows_; }
    Index cols() const { return ncols_; }
    Index nnz() const { return static_cast<Index>(vals_.size()); }

    // Views borrow the arrays, so calling them on a temporary is rejected.
    std::span<const Index> row_ptr() const& { return row_ptr_; }
    std::span<const Index> col_idx() const& { return col_idx_; }
    std::span<const double> values() const& { return vals_; }
    std::span<const Index> row_ptr() const&& = delete;
    std::span<const Index> col_idx() const&& = delete;
    std::span<const double> values() const&& = delete;

    /// Stored value at (i, j), or 0 when absent.  O(log row length).
    double coeff(Index i, Index j) const;

    /// Largest |a_ij|.
    double max_abs() const;

    /// Max absolute row sum.
    double norm_inf() const;

    std::vector<double> multiply(std::span<const double> x) const;

    bool is_canonical() const;

private:
    friend SparseMatrix make_unchecked(Index, Index, std::vector<Index>, std::vector<Index>,
                                       std::vector<double>);

    Index nrows_ = 0;
    Index ncols_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<double> vals_;
};

/// Sums duplicates in order of appearance, skipping input zeros and dropping sums that are
/// exactly zero.  Linear in nnz + nrows + ncols.
SparseMatrix sparse_from_triplets(const TripletBatch& t);

/// Same contract over borrowed arrays.
SparseMatrix sparse_from_triplets(Index nrows, Index ncols, std::span<const Index> rows,
                                  std::span<const Index> cols, std::span<const double> vals);

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix transpose(const SparseMatrix& a);

/// Max over the union pattern of |a_ij - b_ij|.
double max_abs_diff(const SparseMatrix& a, const SparseMatrix& b);

/// `%%MatrixMarket matrix coordinate real general`, one-based, 17 significant digits.
void write_matrixmarket(const SparseMatrix& a, const std::filesystem::path& path);
SparseMatrix read_matrixmarket(const std::filesystem::path& path);

} // namespace simplex_asm
