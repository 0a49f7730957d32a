#ifndef AIRG_POLY_INVERSE_HPP
#define AIRG_POLY_INVERSE_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "airg/sparse_matrix.hpp"

namespace airg {

enum class PolyKind { arnoldi_coeff, newton_roots, neumann };

std::string to_string(PolyKind kind);

/// Polynomial approximation q(A) ~ A^{-1}.
///
/// arnoldi_coeff: coeffs[k] multiplies A^k.
/// newton_roots:  roots are harmonic Ritz values (Leja ordered, conjugate
///                pairs adjacent, added copies included); q is defined by
///                1 - t q(t) = prod_i (1 - t/roots[i]).
/// neumann:       q(A) = sum_{k<=order} (I - D^{-1}A)^k D^{-1}; coeffs holds
///                the equivalent monomial coefficients in D^{-1}A and
///                inv_diag holds D^{-1}.
///
/// `order` is the requested degree and `effective_order` the degree actually
/// reached after breakdown or rank truncation. For newton_roots the applied
/// degree is effective_order + added_roots.
struct PolySolver {
    PolyKind kind = PolyKind::arnoldi_coeff;
    int order = 0;
    int effective_order = 0;
    int added_roots = 0;
    std::vector<double> coeffs;
    std::vector<std::complex<double>> roots;
    Vector inv_diag;
    /// ||b - A q(A) b|| / ||b|| on the generating vector, from the Hessenberg
    /// least-squares problem (not available for neumann, left at -1).
    double generating_residual = -1.0;

    [[nodiscard]] int applied_degree() const;
};

struct NewtonOptions {
    /// Singular values of H below rank_tol * sigma_max count as zero.
    double rank_tol = 1e-12;
    /// Extra copies for roots whose product of other factors exceeds 10^pof_log10_threshold.
    bool add_roots = true;
    double pof_log10_threshold = 4.0;
    double pof_log10_per_copy = 14.0;
};

/// Breakdown when the new subdiagonal falls below this fraction of the
/// largest Hessenberg column norm seen so far.
inline constexpr double arnoldi_breakdown_tol = 1e-14;

/// GMRES polynomial in monomial form from order+1 Arnoldi steps on a random
/// unit start vector drawn from `seed`. Throws std::domain_error for a zero matrix.
PolySolver gmres_poly_arnoldi(const CsrMatrix& A, int order, std::uint64_t seed);

/// Same GMRES polynomial in factored Newton form from the harmonic Ritz values.
PolySolver gmres_poly_newton(const CsrMatrix& A, int order, std::uint64_t seed,
                             const NewtonOptions& opts = {});

/// Truncated Neumann series in the Jacobi-preconditioned operator.
/// Throws std::domain_error on a zero diagonal entry.
PolySolver neumann_poly(const CsrMatrix& A, int order);

/// q(A) b using only SpMVs and vector updates.
Vector apply_matrix_free(const PolySolver& p, const CsrMatrix& A, std::span<const double> b);

/// FLOPs of one apply_matrix_free call: SpMV = 2 nnz, axpy/scale = 2 n.
double application_flops(const PolySolver& p, index_t n, index_t nnz);

/// sum_k c_k A~^k with every power k >= 2 masked to sparsity(A) + diagonal.
/// Only coefficient forms (arnoldi_coeff, neumann) can be assembled.
CsrMatrix assemble_fixed_sparsity(const PolySolver& p, const CsrMatrix& A);

/// Leja ordering of a root set closed under conjugation; pairs stay adjacent
/// with the positive imaginary part first.
std::vector<std::complex<double>> leja_order(const std::vector<std::complex<double>>& roots);

/// log10 of prod_{j != k} |1 - roots[k]/roots[j]| for each k.
std::vector<double> log10_product_of_other_factors(const std::vector<std::complex<double>>& roots);

} // namespace airg

#endif
