#include "airg/poly_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "airg/random.hpp"

namespace airg {

std::string to_string(PolyKind kind) {
    switch (kind) {
    case PolyKind::arnoldi_coeff: return "arnoldi";
    case PolyKind::newton_roots: return "newton";
    case PolyKind::neumann: return "neumann";
    }
    return "unknown";
}

int PolySolver::applied_degree() const {
    return kind == PolyKind::newton_roots ? effective_order + added_roots : effective_order;
}

namespace {

struct ArnoldiBasis {
    Eigen::MatrixXd H; // (capacity+1) x capacity; leading (steps+1) x steps is filled
    int steps = 0;
    bool breakdown = false;
    // coeffs[j] expresses v_j as a polynomial in A applied to the start vector.
    std::vector<std::vector<double>> coeffs;
};

void check_square(const CsrMatrix& A, const char* who) {
    if (!A.is_square()) throw DimensionError(std::string(who) + ": matrix must be square");
    if (A.nrows == 0) throw DimensionError(std::string(who) + ": empty matrix");
}

ArnoldiBasis arnoldi(const CsrMatrix& A, int max_steps, std::uint64_t seed, bool track_coeffs) {
    const index_t n = A.nrows;
    max_steps = static_cast<int>(std::min<index_t>(max_steps, n));

    ArnoldiBasis out;
    out.H = Eigen::MatrixXd::Zero(max_steps + 1, max_steps);
    std::vector<Vector> V;
    V.push_back(random_unit_vector(n, seed));
    if (track_coeffs) out.coeffs.push_back({1.0});

    Vector w(static_cast<std::size_t>(n));
    double col_max = 0.0;
    for (int j = 0; j < max_steps; ++j) {
        spmv(A, V[j], w);
        // Modified Gram-Schmidt, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                const double h = dot(V[i], w);
                out.H(i, j) += h;
                axpy(-h, V[i], w);
            }
        }
        const double sub = norm2(w);
        out.H(j + 1, j) = sub;
        col_max = std::max(col_max, out.H.col(j).head(j + 2).norm());
        out.steps = j + 1;

        if (track_coeffs && sub > 0.0) {
            std::vector<double> next(static_cast<std::size_t>(j) + 2, 0.0);
            for (std::size_t k = 0; k < out.coeffs[j].size(); ++k) next[k + 1] = out.coeffs[j][k];
            for (int i = 0; i <= j; ++i)
                for (std::size_t k = 0; k < out.coeffs[i].size(); ++k)
                    next[k] -= out.H(i, j) * out.coeffs[i][k];
            for (auto& c : next) c /= sub;
            out.coeffs.push_back(std::move(next));
        }

        if (sub <= arnoldi_breakdown_tol * col_max || j + 1 == n) {
            out.breakdown = true;
            break;
        }
        for (auto& x : w) x /= sub;
        V.push_back(w);
    }
    return out;
}

// Minimises ||e1 - H y|| over the first k columns; square solve after breakdown.
Eigen::VectorXd hessenberg_least_squares(const ArnoldiBasis& ab, int k, bool square) {
    const int rows = square ? k : k + 1;
    Eigen::MatrixXd H = ab.H.topLeftCorner(rows, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    rhs(0) = 1.0;
    return H.colPivHouseholderQr().solve(rhs);
}

double hessenberg_residual(const ArnoldiBasis& ab, int k, const Eigen::VectorXd& y) {
    Eigen::VectorXd r = -ab.H.topLeftCorner(k + 1, k) * y;
    r(0) += 1.0;
    return r.norm();
}

} // namespace

PolySolver gmres_poly_arnoldi(const CsrMatrix& A, int order, std::uint64_t seed) {
    check_square(A, "gmres_poly_arnoldi");
    if (order < 0) throw std::invalid_argument("polynomial order must be >= 0");
    if (max_abs(A) == 0.0) throw std::domain_error("gmres_poly_arnoldi: zero matrix has no inverse");

    const auto ab = arnoldi(A, order + 1, seed, true);
    const int k = ab.steps;
    const auto y = hessenberg_least_squares(ab, k, ab.breakdown);

    PolySolver p;
    p.kind = PolyKind::arnoldi_coeff;
    p.order = order;
    p.effective_order = k - 1;
    p.coeffs.assign(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < k; ++j)
        for (std::size_t i = 0; i < ab.coeffs[j].size(); ++i) p.coeffs[i] += y(j) * ab.coeffs[j][i];
    p.generating_residual = hessenberg_residual(ab, k, y);
    return p;
}

std::vector<std::complex<double>> leja_order(const std::vector<std::complex<double>>& roots) {
    // One representative per real root or conjugate pair.
    std::vector<std::complex<double>> reps;
    for (const auto& z : roots)
        if (z.imag() >= 0.0) reps.push_back(z);

    const std::size_t m = reps.size();
    std::vector<double> score(m, 0.0);
    std::vector<bool> used(m, false);
    std::vector<std::complex<double>> out;
    out.reserve(roots.size());

    auto take = [&](std::size_t idx) {
        used[idx] = true;
        const auto z = reps[idx];
        out.push_back(z);
        if (z.imag() > 0.0) out.push_back(std::conj(z));
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            score[i] += std::log(std::abs(reps[i] - z));
            if (z.imag() > 0.0) score[i] += std::log(std::abs(reps[i] - std::conj(z)));
        }
    };

    if (m == 0) return out;
    std::size_t first = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (std::abs(reps[i]) > std::abs(reps[first])) first = i;
    take(first);
    for (std::size_t step = 1; step < m; ++step) {
        std::size_t best = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            if (best == m || score[i] > score[best]) best = i;
        }
        take(best);
    }
    return out;
}

std::vector<double> log10_product_of_other_factors(const std::vector<std::complex<double>>& roots) {
    std::vector<double> out(roots.size(), 0.0);
    for (std::size_t k = 0; k < roots.size(); ++k)
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (j != k) out[k] += std::log10(std::abs(1.0 - roots[k] / roots[j]));
    return out;
}

PolySolver gmres_poly_newton(const CsrMatrix& A, int order, std::uint64_t seed,
                             const NewtonOptions& opts) {
    check_square(A, "gmres_poly_newton");
    if (order < 0) throw std::invalid_argument("polynomial order must be >= 0");
    if (max_abs(A) == 0.0) throw std::domain_error("gmres_poly_newton: zero matrix has no inverse");

    const auto ab = arnoldi(A, order + 1, seed, false);
    int k = ab.steps;
    bool exact = ab.breakdown;

    // Rank-revealing pass: drop trailing Krylov directions that make H_k
    // numerically singular (a low-order polynomial is already exact there).
    for (;;) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ab.H.topLeftCorner(k, k));
        const auto& sv = svd.singularValues();
        const double cut = opts.rank_tol * sv(0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > cut) ++rank;
        if (rank == k || rank == 0) break;
        k = rank;
        exact = false;
    }

    const double sub = exact ? 0.0 : ab.H(k, k - 1);
    Eigen::MatrixXd M = ab.H.topLeftCorner(k, k);
    if (sub != 0.0) {
        Eigen::VectorXd ek = Eigen::VectorXd::Zero(k);
        ek(k - 1) = 1.0;
        const Eigen::VectorXd f = M.transpose().colPivHouseholderQr().solve(ek);
        M.col(k - 1) += sub * sub * f;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> eig(M, false);
    const auto& ev = eig.eigenvalues();

    double largest = 0.0;
    for (int i = 0; i < ev.size(); ++i) largest = std::max(largest, std::abs(ev(i)));
    std::vector<std::complex<double>> theta;
    for (int i = 0; i < ev.size(); ++i) {
        const auto z = ev(i);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
        if (std::abs(z) <= 1e-14 * largest) continue;
        theta.push_back(z);
    }
    if (theta.empty()) throw std::domain_error("gmres_poly_newton: no usable harmonic Ritz values");

    PolySolver p;
    p.kind = PolyKind::newton_roots;
    p.order = order;
    p.effective_order = static_cast<int>(theta.size()) - 1;

    if (opts.add_roots) {
        const auto pof = log10_product_of_other_factors(theta);
        std::vector<std::complex<double>> extra;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (theta[i].imag() < 0.0 || pof[i] <= opts.pof_log10_threshold) continue;
            const int copies = static_cast<int>(
                std::ceil((pof[i] - opts.pof_log10_threshold) / opts.pof_log10_per_copy));
            for (int c = 0; c < copies; ++c) {
                extra.push_back(theta[i]);
                if (theta[i].imag() > 0.0) extra.push_back(std::conj(theta[i]));
            }
        }
        p.added_roots = static_cast<int>(extra.size());
        theta.insert(theta.end(), extra.begin(), extra.end());
    }
    p.roots = leja_order(theta);

    if (exact) {
        p.generating_residual = 0.0;
    } else {
        const auto y = hessenberg_least_squares(ab, k, false);
        p.generating_residual = hessenberg_residual(ab, k, y);
    }
    return p;
}

PolySolver neumann_poly(const CsrMatrix& A, int order) {
    check_square(A, "neumann_poly");
    if (order < 0) throw std::invalid_argument("polynomial order must be >= 0");
    PolySolver p;
    p.kind = PolyKind::neumann;
    p.order = order;
    p.effective_order = order;
    p.inv_diag = diagonal(A);
    for (index_t i = 0; i < A.nrows; ++i) {
        if (p.inv_diag[i] == 0.0)
            throw std::domain_error("neumann_poly: zero diagonal in row " + std::to_string(i));
        p.inv_diag[i] = 1.0 / p.inv_diag[i];
    }
    // sum_{k<=N} (I - M)^k = sum_j (-1)^j C(N+1, j+1) M^j
    p.coeffs.assign(static_cast<std::size_t>(order) + 1, 0.0);
    double binom = static_cast<double>(order + 1); // C(N+1, 1)
    for (int j = 0; j <= order; ++j) {
        p.coeffs[j] = (j % 2 == 0 ? 1.0 : -1.0) * binom;
        binom = binom * static_cast<double>(order + 1 - (j + 1)) / static_cast<double>(j + 2);
    }
    return p;
}

namespace {

Vector apply_horner(const PolySolver& p, const CsrMatrix& A, std::span<const double> b) {
    const std::size_t n = b.size();
    const auto d = static_cast<int>(p.coeffs.size()) - 1;
    Vector y(n), t(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = p.coeffs[d] * b[i];
    for (int k = d - 1; k >= 0; --k) {
        spmv(A, y, t);
        for (std::size_t i = 0; i < n; ++i) y[i] = t[i] + p.coeffs[k] * b[i];
    }
    return y;
}

Vector apply_neumann(const PolySolver& p, const CsrMatrix& A, std::span<const double> b) {
    const std::size_t n = b.size();
    Vector x(n), t(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = p.inv_diag[i] * b[i];
    for (int k = 0; k < p.order; ++k) {
        spmv(A, x, t);
        for (std::size_t i = 0; i < n; ++i) t[i] = b[i] - t[i];
        for (std::size_t i = 0; i < n; ++i) x[i] += p.inv_diag[i] * t[i];
    }
    return x;
}

// Keeps the running residual inside [1e-150, 1e150] by rescaling x and r
// together; the true iterate is x / scale.
constexpr double newton_scale_hi = 1e150;
constexpr double newton_scale_lo = 1e-150;

Vector apply_newton(const PolySolver& p, const CsrMatrix& A, std::span<const double> b) {
    const std::size_t n = b.size();
    Vector x(n, 0.0), r(b.begin(), b.end()), t(n), u(n);
    double scale = 1.0;
    const std::size_t d = p.roots.size();
    std::size_t i = 0;
    while (i < d) {
        const auto theta = p.roots[i];
        if (theta.imag() == 0.0) {
            const double inv = 1.0 / theta.real();
            axpy(inv, r, x);
            if (i + 1 < d) {
                spmv(A, r, t);
                axpy(-inv, t, r);
            }
            i += 1;
        } else {
            const double mod2 = std::norm(theta);
            const double c1 = 2.0 * theta.real() / mod2;
            const double c2 = 1.0 / mod2;
            spmv(A, r, t);
            axpy(c1, r, x);
            axpy(-c2, t, x);
            if (i + 2 < d) {
                spmv(A, t, u);
                axpy(-c1, t, r);
                axpy(c2, u, r);
            }
            i += 2;
        }
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        if (rmax > newton_scale_hi || (rmax > 0.0 && rmax < newton_scale_lo)) {
            const double s = 1.0 / rmax;
            for (auto& v : r) v *= s;
            for (auto& v : x) v *= s;
            scale *= s;
        }
    }
    if (scale != 1.0)
        for (auto& v : x) v /= scale;
    return x;
}

} // namespace

Vector apply_matrix_free(const PolySolver& p, const CsrMatrix& A, std::span<const double> b) {
    if (!A.is_square() || A.nrows != static_cast<index_t>(b.size()))
        throw DimensionError("apply_matrix_free: matrix and vector sizes disagree");
    switch (p.kind) {
    case PolyKind::arnoldi_coeff: return apply_horner(p, A, b);
    case PolyKind::neumann: return apply_neumann(p, A, b);
    case PolyKind::newton_roots: return apply_newton(p, A, b);
    }
    return {};
}

double application_flops(const PolySolver& p, index_t n, index_t nnz) {
    const double spmv_f = 2.0 * static_cast<double>(nnz);
    const double vec = 2.0 * static_cast<double>(n);
    switch (p.kind) {
    case PolyKind::arnoldi_coeff: {
        const double d = static_cast<double>(p.coeffs.size()) - 1.0;
        return vec + d * (spmv_f + vec);
    }
    case PolyKind::neumann:
        return vec + static_cast<double>(p.order) * (spmv_f + 2.0 * vec);
    case PolyKind::newton_roots: {
        double f = 0.0;
        const std::size_t d = p.roots.size();
        std::size_t i = 0;
        while (i < d) {
            if (p.roots[i].imag() == 0.0) {
                f += vec;
                if (i + 1 < d) f += spmv_f + vec;
                i += 1;
            } else {
                f += spmv_f + 2.0 * vec;
                if (i + 2 < d) f += spmv_f + 2.0 * vec;
                i += 2;
            }
        }
        return f;
    }
    }
    return 0.0;
}

CsrMatrix assemble_fixed_sparsity(const PolySolver& p, const CsrMatrix& A) {
    if (!A.is_square()) throw DimensionError("assemble_fixed_sparsity: matrix must be square");
    if (p.kind == PolyKind::newton_roots)
        throw std::invalid_argument("assemble_fixed_sparsity: Newton-form polynomials cannot be assembled");

    const CsrMatrix pattern = with_diagonal(A);
    const index_t n = A.nrows;
    std::vector<index_t> diag_slot(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) {
        const auto cols = pattern.row_cols(i);
        diag_slot[i] = pattern.row_offsets[i] + (std::lower_bound(cols.begin(), cols.end(), i) - cols.begin());
    }

    CsrMatrix base = pattern; // operator whose masked powers are summed
    std::vector<double> coeffs = p.coeffs;
    if (p.kind == PolyKind::neumann) {
        // Powers of N = I - D^{-1}A, all with coefficient one.
        for (index_t i = 0; i < n; ++i)
            for (index_t k = base.row_offsets[i]; k < base.row_offsets[i + 1]; ++k)
                base.values[k] = (k == diag_slot[i] ? 1.0 : 0.0) - p.inv_diag[i] * base.values[k];
        coeffs.assign(static_cast<std::size_t>(p.order) + 1, 1.0);
    }

    CsrMatrix result = pattern;
    std::fill(result.values.begin(), result.values.end(), 0.0);
    for (index_t i = 0; i < n; ++i) result.values[diag_slot[i]] = coeffs[0];
    CsrMatrix power = base;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        if (k >= 2) power = spgemm_fixed_sparsity(power, base, pattern);
        for (std::size_t s = 0; s < result.values.size(); ++s) result.values[s] += coeffs[k] * power.values[s];
    }

    if (p.kind == PolyKind::neumann) {
        // Right-multiply by D^{-1}.
        for (index_t i = 0; i < n; ++i)
            for (index_t k = result.row_offsets[i]; k < result.row_offsets[i + 1]; ++k)
                result.values[k] *= p.inv_diag[result.col_indices[k]];
    }
    return result;
}

} // namespace airg
