#include <doctest.h>

#include <cmath>
#include <sstream>

#include "airg/matrix_market.hpp"
#include "airg/sparse_matrix.hpp"
#include "oracles.hpp"

using namespace airg;
using oracle::Dense;
using oracle::to_dense;
using oracle::from_dense;

namespace {

double rel_diff(const Dense& a, const Dense& b) {
    const double scale = std::max(b.norm(), 1e-300);
    return (a - b).norm() / scale;
}

CsrMatrix random_csr(index_t r, index_t c, double density, std::uint64_t seed) {
    return from_dense(oracle::random_sparse(r, c, density, seed));
}

} // namespace

TEST_CASE("csr construction validates canonical form") {
    CHECK_NOTHROW(CsrMatrix(2, 2, {0, 1, 2}, {1, 0}, {1.0, 2.0}).nnz());
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 2.0}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 2.0}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 1}, {3}, {1.0}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 1}, {0}, {NAN}), DimensionError);
    CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {0}, {1.0}), DimensionError);
}

TEST_CASE("from_triplets sums duplicates and sorts") {
    auto A = from_triplets(3, 3, {{2, 0, 1.0}, {0, 2, 4.0}, {0, 1, 2.0}, {2, 0, 0.5}, {1, 1, 3.0}});
    CHECK(is_canonical(A));
    CHECK(A.nnz() == 4);
    CHECK(A.at(2, 0) == 1.5);
    CHECK(A.at(0, 1) == 2.0);
    CHECK(A.at(0, 2) == 4.0);
    CHECK(A.at(1, 0) == 0.0);
    CHECK_THROWS_AS(from_triplets(2, 2, {{2, 0, 1.0}}), DimensionError);
}

TEST_CASE("spmv small cases") {
    auto I = CsrMatrix::identity(3);
    CHECK(spmv(I, std::vector<double>{1, 2, 3}) == std::vector<double>{1, 2, 3});
    std::vector<double> d{2, 2};
    CHECK(spmv(CsrMatrix::diagonal(d), std::vector<double>{1, 1}) == std::vector<double>{2, 2});
    CHECK_THROWS_AS(spmv(I, std::vector<double>{1, 2}), DimensionError);
}

TEST_CASE("spmv matches dense matvec") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Dense D = oracle::random_sparse(5, 5, 0.4, seed);
        auto A = from_dense(D);
        oracle::DVec x = oracle::DVec::Random(5);
        auto y = spmv(A, oracle::to_std(x));
        oracle::DVec ref = D * x;
        CHECK((oracle::to_eigen(y) - ref).norm() <= 1e-14 * std::max(ref.norm(), 1.0));
    }
}

TEST_CASE("residual computes b - Ax") {
    auto A = from_triplets(2, 2, {{0, 0, 2.0}, {1, 0, -1.0}, {1, 1, 1.0}});
    std::vector<double> x{1, 2}, b{3, 3}, r(2);
    residual(A, x, b, r);
    CHECK(r == std::vector<double>{1, 2});
}

TEST_CASE("spgemm identities and dense oracle") {
    auto B = random_csr(6, 6, 0.4, 7);
    auto I = CsrMatrix::identity(6);
    auto IB = spgemm(I, B);
    CHECK(IB.col_indices == B.col_indices);
    CHECK(IB.values == B.values);
    auto BI = spgemm(B, I);
    CHECK(BI.values == B.values);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Dense a = oracle::random_sparse(6, 6, 0.35, seed), b = oracle::random_sparse(6, 6, 0.35, seed + 100);
        auto C = spgemm(from_dense(a), from_dense(b));
        CHECK(is_canonical(C));
        CHECK((to_dense(C) - a * b).cwiseAbs().maxCoeff() <= 1e-14);
    }
    CHECK_THROWS_AS(spgemm(random_csr(2, 3, 1.0, 1), random_csr(2, 3, 1.0, 2)), DimensionError);
}

TEST_CASE("spgemm keeps cancellation zeros") {
    auto A = from_triplets(1, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
    auto B = from_triplets(2, 1, {{0, 0, 1.0}, {1, 0, -1.0}});
    auto C = spgemm(A, B);
    CHECK(C.nnz() == 1);
    CHECK(C.values[0] == 0.0);
}

TEST_CASE("spgemm is associative") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto A = random_csr(5, 7, 0.4, seed), B = random_csr(7, 6, 0.4, seed + 10), C = random_csr(6, 4, 0.4, seed + 20);
        Dense left = to_dense(spgemm(spgemm(A, B), C));
        Dense right = to_dense(spgemm(A, spgemm(B, C)));
        CHECK((left - right).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, right.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("spgemm_fixed_sparsity") {
    auto A = random_csr(5, 5, 0.5, 3);
    Dense full = Dense::Ones(5, 5);
    auto P = from_dense(full);
    auto AI = spgemm_fixed_sparsity(A, CsrMatrix::identity(5), P);
    CHECK(AI.nnz() == 25);
    CHECK(rel_diff(to_dense(AI), to_dense(A)) == 0.0);

    // tridiagonal T^2 masked to T's pattern
    Dense T = Dense::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        T(i, i) = 2.0 + i;
        if (i > 0) T(i, i - 1) = -1.0 - 0.1 * i;
        if (i < 5) T(i, i + 1) = 0.5 * i - 1.0;
    }
    auto Ts = from_dense(T);
    auto TT = spgemm_fixed_sparsity(Ts, Ts, Ts);
    CHECK(TT.col_indices == Ts.col_indices);
    Dense ref = T * T;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (std::abs(i - j) > 1) ref(i, j) = 0.0;
    CHECK((to_dense(TT) - ref).cwiseAbs().maxCoeff() <= 1e-14);

    auto D = spgemm_fixed_sparsity(Ts, Ts, CsrMatrix::identity(6));
    CHECK(D.nnz() == 6);
    for (int i = 0; i < 6; ++i) CHECK(D.at(i, i) == doctest::Approx((T * T)(i, i)).epsilon(1e-15));
    CHECK_THROWS_AS(spgemm_fixed_sparsity(Ts, Ts, CsrMatrix::identity(5)), DimensionError);
}

TEST_CASE("extract blocks and round trip") {
    Dense D(4, 4);
    D << 1, 2, 0, 3, 0, 4, 5, 0, 6, 0, 7, 8, 0, 9, 0, 10;
    auto A = from_dense(D);
    auto all = IndexSet::all(4);
    auto same = extract(A, all, all);
    CHECK(same.values == A.values);
    CHECK(same.col_indices == A.col_indices);

    IndexSet rows({0, 2}, 4), cols({1, 3}, 4);
    auto B = extract(A, rows, cols);
    Dense ref(2, 2);
    ref << 2, 3, 0, 8;
    CHECK(to_dense(B) == ref);

    auto E = extract(A, IndexSet({}, 4), cols);
    CHECK(E.nrows == 0);
    CHECK(E.ncols == 2);
    CHECK(E.nnz() == 0);

    CHECK_THROWS_AS(IndexSet({0, 4}, 4), DimensionError);
    CHECK_THROWS_AS(IndexSet({2, 1}, 4), DimensionError);
    CHECK_THROWS_AS(extract(A, IndexSet({0}, 5), cols), DimensionError);

    // Four-block reassembly under a permutation reproduces A exactly.
    auto M = random_csr(9, 9, 0.4, 11);
    IndexSet f({0, 3, 4, 8}, 9), c({1, 2, 5, 6, 7}, 9);
    Dense rebuilt = Dense::Zero(9, 9);
    index_t total = 0;
    for (auto [rs, cs] : {std::pair{f, f}, {f, c}, {c, f}, {c, c}}) {
        auto blk = extract(M, rs, cs);
        total += blk.nnz();
        Dense b = to_dense(blk);
        for (index_t i = 0; i < rs.size(); ++i)
            for (index_t j = 0; j < cs.size(); ++j) rebuilt(rs[i], cs[j]) = b(i, j);
    }
    CHECK(total == M.nnz());
    CHECK(rebuilt == to_dense(M));
}

TEST_CASE("drop_and_lump") {
    auto A = random_csr(6, 6, 0.6, 5);
    auto same = drop_and_lump(A, 0.0, true);
    CHECK(same.values == A.values);
    CHECK(same.col_indices == A.col_indices);

    auto row = from_triplets(3, 3, {{0, 0, 2.0}, {0, 1, 1e-8}, {0, 2, -1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
    auto L = drop_and_lump(row, 1e-6, true);
    CHECK(L.row_cols(0).size() == 2);
    CHECK(L.at(0, 0) == 2.0 + 1e-8);
    CHECK(L.at(0, 2) == -1.0);

    auto noLump = drop_and_lump(row, 1e-6, false);
    CHECK(noLump.at(0, 0) == 2.0);
    CHECK(noLump.row_cols(0).size() == 2);

    CHECK_THROWS(drop_and_lump(random_csr(3, 4, 0.5, 1), 0.1, true));
    CHECK_THROWS(drop_and_lump(A, -1.0, false));
}

TEST_CASE("drop_and_lump never drops the diagonal and inserts it when missing") {
    // Row 1 has no stored diagonal; its small entry is lumped into a new one.
    auto B = from_triplets(3, 3, {{0, 0, 1e-9}, {0, 1, 1.0}, {1, 0, 5.0}, {1, 2, 1e-3}, {2, 2, 1.0}});
    auto L = drop_and_lump(B, 0.01, true);
    CHECK(L.at(0, 0) == 1e-9);
    CHECK(L.at(1, 1) == 1e-3);
    CHECK(L.at(1, 2) == 0.0);
    CHECK(is_canonical(L));
}

TEST_CASE("drop_and_lump preserves row sums (property)") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto A = random_csr(8, 8, 0.6, seed);
        for (double tol : {0.05, 0.1, 0.5}) {
            auto L = drop_and_lump(A, tol, true);
            CHECK(is_canonical(L));
            auto before = row_sums(A), after = row_sums(L);
            for (std::size_t i = 0; i < before.size(); ++i) {
                double scale = 0.0;
                for (double v : A.row_vals(static_cast<index_t>(i))) scale += std::abs(v);
                CHECK(std::abs(before[i] - after[i]) <= 1e-14 * std::max(scale, 1.0));
            }
            // Every surviving off-diagonal meets the row-relative threshold.
            for (index_t i = 0; i < L.nrows; ++i) {
                double mx = 0.0;
                for (double v : A.row_vals(i)) mx = std::max(mx, std::abs(v));
                for (std::size_t k = 0; k < L.row_cols(i).size(); ++k)
                    if (L.row_cols(i)[k] != i) CHECK(std::abs(L.row_vals(i)[k]) >= tol * mx);
            }
        }
    }
}

TEST_CASE("transpose and diagonal") {
    auto I = CsrMatrix::identity(4);
    auto It = transpose(I);
    CHECK(It.values == I.values);
    CHECK(It.col_indices == I.col_indices);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto A = random_csr(7, 7, 0.4, seed);
        auto Att = transpose(transpose(A));
        CHECK(Att.values == A.values);
        CHECK(Att.col_indices == A.col_indices);
        CHECK(Att.row_offsets == A.row_offsets);
        CHECK(to_dense(transpose(A)) == to_dense(A).transpose());
    }
    auto L = from_triplets(3, 3, {{1, 0, 1.0}, {2, 0, 2.0}, {2, 1, 3.0}});
    CHECK(diagonal(L) == std::vector<double>{0, 0, 0});
}

TEST_CASE("add, scale, with_diagonal") {
    auto A = random_csr(5, 5, 0.4, 2), B = random_csr(5, 5, 0.4, 3);
    CHECK((to_dense(add(A, B, 2.0, -1.0)) - (2.0 * to_dense(A) - to_dense(B))).cwiseAbs().maxCoeff() == 0.0);
    CHECK(to_dense(scale(A, -3.0)) == -3.0 * to_dense(A));
    auto W = with_diagonal(from_triplets(2, 2, {{0, 1, 1.0}}));
    CHECK(W.nnz() == 3);
    CHECK(W.at(0, 0) == 0.0);
    CHECK(is_canonical(W));
}

TEST_CASE("matrix market round trip") {
    auto A = random_csr(6, 4, 0.5, 9);
    A.values[0] = 0.1 + 1e-17;
    A.values[1] = -1.0 / 3.0;
    std::stringstream ss;
    write_matrix_market(ss, A);
    auto B = read_matrix_market(ss);
    CHECK(B.nrows == 6);
    CHECK(B.ncols == 4);
    CHECK(B.values == A.values);
    CHECK(B.col_indices == A.col_indices);
}

TEST_CASE("matrix market reader variants and errors") {
    std::stringstream sym("%%MatrixMarket matrix coordinate integer symmetric\n% c\n3 3 3\n1 1 2\n2 1 -1\n3 3 4\n");
    auto S = read_matrix_market(sym);
    CHECK(S.at(0, 1) == -1.0);
    CHECK(S.at(1, 0) == -1.0);
    CHECK(S.at(2, 2) == 4.0);

    std::stringstream dup("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n1 1 2.5\n");
    CHECK(read_matrix_market(dup).at(0, 0) == 4.0);

    std::stringstream bad("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
    CHECK_THROWS_AS(read_matrix_market(bad), MatrixMarketError);
    std::stringstream oob("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(oob), MatrixMarketError);
    std::stringstream shortf("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market(shortf), MatrixMarketError);
    CHECK_THROWS_AS(read_matrix_market(std::string("/nonexistent/file.mtx")), MatrixMarketError);
}
