#ifndef AIRG_SPARSE_MATRIX_HPP
#define AIRG_SPARSE_MATRIX_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace airg {

using index_t = std::int64_t;
using Vector = std::vector<double>;

/// Raised for shape mismatches, invalid index sets and malformed CSR data.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Compressed sparse row matrix with 0-based 64-bit indices.
///
/// Canonical form: column indices strictly increasing within each row, no
/// duplicates, all values finite. Every kernel in this header consumes and
/// produces canonical matrices. Explicit zeros are allowed and are kept
/// until a drop pass removes them.
struct CsrMatrix {
    index_t nrows = 0;
    index_t ncols = 0;
    std::vector<index_t> row_offsets{0};
    std::vector<index_t> col_indices;
    std::vector<double> values;

    CsrMatrix() = default;
    CsrMatrix(index_t rows, index_t cols);
    CsrMatrix(index_t rows, index_t cols, std::vector<index_t> offsets,
              std::vector<index_t> cols_idx, std::vector<double> vals);

    [[nodiscard]] index_t nnz() const { return static_cast<index_t>(values.size()); }
    [[nodiscard]] bool is_square() const { return nrows == ncols; }

    [[nodiscard]] std::span<const index_t> row_cols(index_t i) const {
        return {col_indices.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }
    [[nodiscard]] std::span<const double> row_vals(index_t i) const {
        return {values.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }

    /// Value at (i, j), zero when structurally absent. Binary search per call.
    [[nodiscard]] double at(index_t i, index_t j) const;

    static CsrMatrix identity(index_t n);
    static CsrMatrix diagonal(std::span<const double> d);
};

/// Coordinate entry used to build matrices; duplicates are summed.
struct Triplet {
    index_t row;
    index_t col;
    double value;
};

CsrMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries);

/// Throws DimensionError describing the first canonical-form violation.
void validate(const CsrMatrix& A);
[[nodiscard]] bool is_canonical(const CsrMatrix& A);

/// Sorted, duplicate-free positions into a parent ordering of size `parent_size`.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::vector<index_t> indices, index_t parent_size);

    static IndexSet all(index_t n);

    [[nodiscard]] index_t size() const { return static_cast<index_t>(indices_.size()); }
    [[nodiscard]] index_t parent_size() const { return parent_size_; }
    [[nodiscard]] bool empty() const { return indices_.empty(); }
    [[nodiscard]] index_t operator[](index_t k) const { return indices_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] const std::vector<index_t>& indices() const { return indices_; }

    /// Map parent index -> position in this set, -1 where absent.
    [[nodiscard]] std::vector<index_t> inverse_map() const;

private:
    std::vector<index_t> indices_;
    index_t parent_size_ = 0;
};

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
[[nodiscard]] Vector spmv(const CsrMatrix& A, std::span<const double> x);

/// y = b - A x
void residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b,
              std::span<double> y);

/// Exact structural product; cancellation zeros are retained.
[[nodiscard]] CsrMatrix spgemm(const CsrMatrix& A, const CsrMatrix& B);

/// (A B) restricted to the structure of `pattern`. The result carries exactly
/// pattern's structure; product entries outside it are discarded.
[[nodiscard]] CsrMatrix spgemm_fixed_sparsity(const CsrMatrix& A, const CsrMatrix& B,
                                              const CsrMatrix& pattern);

[[nodiscard]] CsrMatrix extract(const CsrMatrix& A, const IndexSet& rows, const IndexSet& cols);

/// Drops off-diagonal a_ij with |a_ij| < rel_tol * max_k |a_ik|. With lump the
/// dropped mass is added to a_ii (inserting the diagonal if needed).
[[nodiscard]] CsrMatrix drop_and_lump(const CsrMatrix& A, double rel_tol, bool lump);

[[nodiscard]] CsrMatrix transpose(const CsrMatrix& A);
[[nodiscard]] Vector diagonal(const CsrMatrix& A);

/// Structure of A with the diagonal added where missing; values of A kept.
[[nodiscard]] CsrMatrix with_diagonal(const CsrMatrix& A);

[[nodiscard]] CsrMatrix scale(const CsrMatrix& A, double s);
/// alpha*A + beta*B on the union pattern.
[[nodiscard]] CsrMatrix add(const CsrMatrix& A, const CsrMatrix& B, double alpha = 1.0,
                            double beta = 1.0);

[[nodiscard]] std::vector<double> row_sums(const CsrMatrix& A);
[[nodiscard]] double max_abs(const CsrMatrix& A);

// Dense vector helpers used across the solver.
[[nodiscard]] double norm2(std::span<const double> x);
[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);

} // namespace airg

#endif
