#include "airg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace airg {

namespace {

std::string shape(const CsrMatrix& A) {
    return std::to_string(A.nrows) + "x" + std::to_string(A.ncols);
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw DimensionError(msg);
}

} // namespace

CsrMatrix::CsrMatrix(index_t rows, index_t cols)
    : nrows(rows), ncols(cols), row_offsets(static_cast<std::size_t>(rows) + 1, 0) {
    require(rows >= 0 && cols >= 0, "negative matrix dimension");
}

CsrMatrix::CsrMatrix(index_t rows, index_t cols, std::vector<index_t> offsets,
                     std::vector<index_t> cols_idx, std::vector<double> vals)
    : nrows(rows), ncols(cols), row_offsets(std::move(offsets)),
      col_indices(std::move(cols_idx)), values(std::move(vals)) {
    validate(*this);
}

double CsrMatrix::at(index_t i, index_t j) const {
    auto cols = row_cols(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values[static_cast<std::size_t>(row_offsets[i] + (it - cols.begin()))];
}

CsrMatrix CsrMatrix::identity(index_t n) {
    CsrMatrix I(n, n);
    I.col_indices.resize(static_cast<std::size_t>(n));
    I.values.assign(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i < n; ++i) {
        I.row_offsets[i + 1] = i + 1;
        I.col_indices[i] = i;
    }
    return I;
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
    auto D = identity(static_cast<index_t>(d.size()));
    std::copy(d.begin(), d.end(), D.values.begin());
    return D;
}

CsrMatrix from_triplets(index_t nrows, index_t ncols, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        require(t.row >= 0 && t.row < nrows && t.col >= 0 && t.col < ncols,
                "triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                    ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix A(nrows, ncols);
    index_t last_row = -1;
    for (const auto& t : entries) {
        if (t.row == last_row && A.col_indices.back() == t.col) {
            A.values.back() += t.value;
            continue;
        }
        A.col_indices.push_back(t.col);
        A.values.push_back(t.value);
        ++A.row_offsets[t.row + 1];
        last_row = t.row;
    }
    std::partial_sum(A.row_offsets.begin(), A.row_offsets.end(), A.row_offsets.begin());
    validate(A);
    return A;
}

void validate(const CsrMatrix& A) {
    require(A.nrows >= 0 && A.ncols >= 0, "negative matrix dimension");
    require(static_cast<index_t>(A.row_offsets.size()) == A.nrows + 1,
            "row_offsets length must be nrows+1");
    require(A.row_offsets.front() == 0, "row_offsets[0] must be 0");
    require(A.row_offsets.back() == static_cast<index_t>(A.col_indices.size()) &&
                A.col_indices.size() == A.values.size(),
            "row_offsets[nrows], col_indices and values lengths disagree");
    for (index_t i = 0; i < A.nrows; ++i) {
        require(A.row_offsets[i] <= A.row_offsets[i + 1], "row_offsets decreasing at row " +
                                                              std::to_string(i));
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            index_t c = A.col_indices[k];
            require(c >= 0 && c < A.ncols, "column index out of range in row " + std::to_string(i));
            require(k == A.row_offsets[i] || A.col_indices[k - 1] < c,
                    "columns not strictly increasing in row " + std::to_string(i));
            require(std::isfinite(A.values[k]), "non-finite value in row " + std::to_string(i));
        }
    }
}

bool is_canonical(const CsrMatrix& A) {
    try {
        validate(A);
        return true;
    } catch (const DimensionError&) {
        return false;
    }
}

IndexSet::IndexSet(std::vector<index_t> indices, index_t parent_size)
    : indices_(std::move(indices)), parent_size_(parent_size) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        require(indices_[k] >= 0 && indices_[k] < parent_size_,
                "index " + std::to_string(indices_[k]) + " outside parent of size " +
                    std::to_string(parent_size_));
        require(k == 0 || indices_[k - 1] < indices_[k], "index set not strictly increasing");
    }
}

IndexSet IndexSet::all(index_t n) {
    std::vector<index_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), index_t{0});
    return IndexSet(std::move(idx), n);
}

std::vector<index_t> IndexSet::inverse_map() const {
    std::vector<index_t> map(static_cast<std::size_t>(parent_size_), -1);
    for (std::size_t k = 0; k < indices_.size(); ++k) map[indices_[k]] = static_cast<index_t>(k);
    return map;
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    require(static_cast<index_t>(x.size()) == A.ncols && static_cast<index_t>(y.size()) == A.nrows,
            "spmv: " + shape(A) + " with x of length " + std::to_string(x.size()));
    for (index_t i = 0; i < A.nrows; ++i) {
        double sum = 0.0;
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            sum += A.values[k] * x[A.col_indices[k]];
        y[i] = sum;
    }
}

Vector spmv(const CsrMatrix& A, std::span<const double> x) {
    Vector y(static_cast<std::size_t>(A.nrows));
    spmv(A, x, y);
    return y;
}

void residual(const CsrMatrix& A, std::span<const double> x, std::span<const double> b,
              std::span<double> y) {
    require(static_cast<index_t>(b.size()) == A.nrows, "residual: rhs length mismatch");
    spmv(A, x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = b[i] - y[i];
}

CsrMatrix spgemm(const CsrMatrix& A, const CsrMatrix& B) {
    require(A.ncols == B.nrows, "spgemm: " + shape(A) + " times " + shape(B));
    CsrMatrix C(A.nrows, B.ncols);
    // Gustavson with a dense accumulator; marker[j] is the last row that touched column j.
    std::vector<index_t> marker(static_cast<std::size_t>(B.ncols), -1);
    std::vector<index_t> row_cols;
    std::vector<double> acc(static_cast<std::size_t>(B.ncols), 0.0);
    for (index_t i = 0; i < A.nrows; ++i) {
        row_cols.clear();
        for (index_t ka = A.row_offsets[i]; ka < A.row_offsets[i + 1]; ++ka) {
            const index_t k = A.col_indices[ka];
            const double a = A.values[ka];
            for (index_t kb = B.row_offsets[k]; kb < B.row_offsets[k + 1]; ++kb) {
                const index_t j = B.col_indices[kb];
                if (marker[j] != i) {
                    marker[j] = i;
                    acc[j] = 0.0;
                    row_cols.push_back(j);
                }
                acc[j] += a * B.values[kb];
            }
        }
        std::sort(row_cols.begin(), row_cols.end());
        for (index_t j : row_cols) {
            C.col_indices.push_back(j);
            C.values.push_back(acc[j]);
        }
        C.row_offsets[i + 1] = static_cast<index_t>(C.col_indices.size());
    }
    return C;
}

CsrMatrix spgemm_fixed_sparsity(const CsrMatrix& A, const CsrMatrix& B, const CsrMatrix& pattern) {
    require(A.ncols == B.nrows, "spgemm_fixed_sparsity: " + shape(A) + " times " + shape(B));
    require(pattern.nrows == A.nrows && pattern.ncols == B.ncols,
            "spgemm_fixed_sparsity: pattern " + shape(pattern) + " does not match product shape");
    CsrMatrix C = pattern;
    std::vector<index_t> slot(static_cast<std::size_t>(B.ncols), -1);
    for (index_t i = 0; i < A.nrows; ++i) {
        const index_t begin = pattern.row_offsets[i];
        const index_t end = pattern.row_offsets[i + 1];
        for (index_t p = begin; p < end; ++p) {
            slot[pattern.col_indices[p]] = p;
            C.values[p] = 0.0;
        }
        for (index_t ka = A.row_offsets[i]; ka < A.row_offsets[i + 1]; ++ka) {
            const index_t k = A.col_indices[ka];
            const double a = A.values[ka];
            for (index_t kb = B.row_offsets[k]; kb < B.row_offsets[k + 1]; ++kb) {
                const index_t p = slot[B.col_indices[kb]];
                if (p >= begin && p < end) C.values[p] += a * B.values[kb];
            }
        }
        for (index_t p = begin; p < end; ++p) slot[pattern.col_indices[p]] = -1;
    }
    return C;
}

CsrMatrix extract(const CsrMatrix& A, const IndexSet& rows, const IndexSet& cols) {
    require(rows.parent_size() == A.nrows && cols.parent_size() == A.ncols,
            "extract: index sets sized for a different matrix than " + shape(A));
    const auto col_map = cols.inverse_map();
    CsrMatrix S(rows.size(), cols.size());
    for (index_t r = 0; r < rows.size(); ++r) {
        const index_t i = rows[r];
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            const index_t c = col_map[A.col_indices[k]];
            if (c < 0) continue;
            S.col_indices.push_back(c);
            S.values.push_back(A.values[k]);
        }
        S.row_offsets[r + 1] = static_cast<index_t>(S.col_indices.size());
    }
    return S;
}

CsrMatrix drop_and_lump(const CsrMatrix& A, double rel_tol, bool lump) {
    if (rel_tol < 0.0) throw std::invalid_argument("drop_and_lump: rel_tol must be >= 0");
    require(!lump || A.is_square(), "drop_and_lump: lumping requires a square matrix, got " + shape(A));
    if (rel_tol == 0.0) return A;

    CsrMatrix D(A.nrows, A.ncols);
    D.col_indices.reserve(A.col_indices.size());
    D.values.reserve(A.values.size());
    for (index_t i = 0; i < A.nrows; ++i) {
        double row_max = 0.0;
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k)
            row_max = std::max(row_max, std::abs(A.values[k]));
        const double cut = rel_tol * row_max;

        double dropped = 0.0;
        const auto row_start = static_cast<std::ptrdiff_t>(D.col_indices.size());
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            const index_t j = A.col_indices[k];
            if (j != i && std::abs(A.values[k]) < cut) {
                dropped += A.values[k];
                continue;
            }
            D.col_indices.push_back(j);
            D.values.push_back(A.values[k]);
        }
        if (lump && dropped != 0.0) {
            auto first = D.col_indices.begin() + row_start;
            auto pos = std::lower_bound(first, D.col_indices.end(), i);
            const auto slot = pos - D.col_indices.begin();
            if (pos == D.col_indices.end() || *pos != i) {
                D.col_indices.insert(pos, i);
                D.values.insert(D.values.begin() + slot, 0.0);
            }
            D.values[slot] += dropped;
        }
        D.row_offsets[i + 1] = static_cast<index_t>(D.col_indices.size());
    }
    return D;
}

CsrMatrix transpose(const CsrMatrix& A) {
    CsrMatrix T(A.ncols, A.nrows);
    for (index_t c : A.col_indices) ++T.row_offsets[c + 1];
    std::partial_sum(T.row_offsets.begin(), T.row_offsets.end(), T.row_offsets.begin());
    T.col_indices.resize(A.col_indices.size());
    T.values.resize(A.values.size());
    std::vector<index_t> next(T.row_offsets.begin(), T.row_offsets.end() - 1);
    for (index_t i = 0; i < A.nrows; ++i) {
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            const index_t slot = next[A.col_indices[k]]++;
            T.col_indices[slot] = i;
            T.values[slot] = A.values[k];
        }
    }
    return T;
}

Vector diagonal(const CsrMatrix& A) {
    const index_t n = std::min(A.nrows, A.ncols);
    Vector d(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i) d[i] = A.at(i, i);
    return d;
}

CsrMatrix with_diagonal(const CsrMatrix& A) {
    require(A.is_square(), "with_diagonal: matrix must be square, got " + shape(A));
    CsrMatrix D(A.nrows, A.ncols);
    D.col_indices.reserve(A.col_indices.size() + static_cast<std::size_t>(A.nrows));
    D.values.reserve(D.col_indices.capacity());
    for (index_t i = 0; i < A.nrows; ++i) {
        bool placed = false;
        for (index_t k = A.row_offsets[i]; k < A.row_offsets[i + 1]; ++k) {
            const index_t j = A.col_indices[k];
            if (!placed && j >= i) {
                if (j != i) {
                    D.col_indices.push_back(i);
                    D.values.push_back(0.0);
                }
                placed = true;
            }
            D.col_indices.push_back(j);
            D.values.push_back(A.values[k]);
        }
        if (!placed) {
            D.col_indices.push_back(i);
            D.values.push_back(0.0);
        }
        D.row_offsets[i + 1] = static_cast<index_t>(D.col_indices.size());
    }
    return D;
}

CsrMatrix scale(const CsrMatrix& A, double s) {
    CsrMatrix B = A;
    for (auto& v : B.values) v *= s;
    return B;
}

CsrMatrix add(const CsrMatrix& A, const CsrMatrix& B, double alpha, double beta) {
    require(A.nrows == B.nrows && A.ncols == B.ncols, "add: " + shape(A) + " + " + shape(B));
    CsrMatrix C(A.nrows, A.ncols);
    for (index_t i = 0; i < A.nrows; ++i) {
        index_t ka = A.row_offsets[i], kb = B.row_offsets[i];
        const index_t ea = A.row_offsets[i + 1], eb = B.row_offsets[i + 1];
        while (ka < ea || kb < eb) {
            const index_t ja = ka < ea ? A.col_indices[ka] : A.ncols;
            const index_t jb = kb < eb ? B.col_indices[kb] : B.ncols;
            if (ja == jb) {
                C.col_indices.push_back(ja);
                C.values.push_back(alpha * A.values[ka++] + beta * B.values[kb++]);
            } else if (ja < jb) {
                C.col_indices.push_back(ja);
                C.values.push_back(alpha * A.values[ka++]);
            } else {
                C.col_indices.push_back(jb);
                C.values.push_back(beta * B.values[kb++]);
            }
        }
        C.row_offsets[i + 1] = static_cast<index_t>(C.col_indices.size());
    }
    return C;
}

std::vector<double> row_sums(const CsrMatrix& A) {
    std::vector<double> s(static_cast<std::size_t>(A.nrows), 0.0);
    for (index_t i = 0; i < A.nrows; ++i)
        for (double v : A.row_vals(i)) s[i] += v;
    return s;
}

double max_abs(const CsrMatrix& A) {
    double m = 0.0;
    for (double v : A.values) m = std::max(m, std::abs(v));
    return m;
}

double norm2(std::span<const double> x) {
    return std::sqrt(dot(x, x));
}

double dot(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), "dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    require(x.size() == y.size(), "axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace airg
