#include "airg/cycle.hpp"

#include <cmath>
#include <string>

namespace airg {

void SolveConfig::validate() const {
    if (!(rtol > 0.0)) throw ConfigError("rtol must be > 0");
    if (!(atol >= 0.0)) throw ConfigError("atol must be >= 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (f_smooth_its < 1) throw ConfigError("f_smooth_its must be >= 1");
    if (!(divergence_factor > 1.0)) throw ConfigError("divergence_factor must be > 1");
}

namespace {

Vector apply_smoother(const Level& L, std::span<const double> rhs) {
    if (L.assembled_inverse) return spmv(*L.assembled_inverse, rhs);
    return apply_matrix_free(L.f_smoother, L.A_ff, rhs);
}

double smoother_flops(const Level& L) {
    if (L.assembled_inverse) return 2.0 * static_cast<double>(L.assembled_inverse->nnz());
    return application_flops(L.f_smoother, L.A_ff.nrows, L.A_ff.nnz());
}

} // namespace

Vector vcycle(const Hierarchy& H, int level, std::span<const double> r, int f_smooth_its) {
    if (level < 0 || level >= H.num_levels()) throw DimensionError("vcycle: level out of range");
    if (static_cast<index_t>(r.size()) != H.level_size(level))
        throw DimensionError("vcycle: residual has wrong length for level " + std::to_string(level));

    if (level == static_cast<int>(H.levels.size())) {
        if (!H.coarse_solver) return Vector(r.size(), 0.0);
        return apply_matrix_free(*H.coarse_solver, H.coarsest_A, r);
    }

    const Level& L = H.levels[level];
    const Vector r_coarse = spmv(L.R, r);
    const Vector e_c = vcycle(H, level + 1, r_coarse, f_smooth_its);

    const index_t n_f = L.split.n_fine();
    Vector rhs(static_cast<std::size_t>(n_f));
    for (index_t k = 0; k < n_f; ++k) rhs[k] = r[L.split.f_set[k]];
    // A_fc e_c does not change between passes.
    if (L.A_fc.nnz() > 0) axpy(-1.0, spmv(L.A_fc, e_c), rhs);

    Vector e_f = apply_smoother(L, rhs);
    Vector t(rhs.size());
    for (int it = 1; it < f_smooth_its; ++it) {
        residual(L.A_ff, e_f, rhs, t);
        axpy(1.0, apply_smoother(L, t), e_f);
    }

    Vector e(r.size());
    for (index_t k = 0; k < n_f; ++k) e[L.split.f_set[k]] = e_f[k];
    for (index_t k = 0; k < L.split.n_coarse(); ++k) e[L.split.c_set[k]] = e_c[k];
    return e;
}

SolveResult richardson_solve(const Hierarchy& H, std::span<const double> b, std::span<const double> x0,
                             const SolveConfig& cfg) {
    cfg.validate();
    const CsrMatrix& A = H.top_A;
    if (static_cast<index_t>(b.size()) != A.nrows || static_cast<index_t>(x0.size()) != A.nrows)
        throw DimensionError("richardson_solve: vector lengths do not match the matrix");

    SolveResult out;
    out.x.assign(x0.begin(), x0.end());
    SolveStats& st = out.stats;
    st.storage_complexity = H.storage_complexity;
    st.flops_per_cycle = count_cycle_flops(H, cfg.f_smooth_its);
    st.cycle_complexity = cycle_complexity(H, cfg.f_smooth_its);

    Vector r(b.size());
    residual(A, out.x, b, r);
    const double r0 = norm2(r);
    st.residual_history.push_back(r0);
    if (!std::isfinite(r0)) throw DivergenceError(0, "initial residual is not finite");
    const double b_norm = norm2(b);
    const double ref = b_norm > 0.0 ? b_norm : r0;
    const double threshold = std::max(cfg.rtol * ref, cfg.atol);
    if (r0 <= threshold) {
        st.converged = true;
        return out;
    }

    for (int it = 1; it <= cfg.max_iters; ++it) {
        const Vector e = vcycle(H, 0, r, cfg.f_smooth_its);
        axpy(1.0, e, out.x);
        residual(A, out.x, b, r);
        const double rn = norm2(r);
        st.residual_history.push_back(rn);
        st.iterations = it;
        if (!std::isfinite(rn))
            throw DivergenceError(it, "residual became non-finite at iteration " + std::to_string(it));
        if (rn > cfg.divergence_factor * r0)
            throw DivergenceError(it, "residual grew beyond " + std::to_string(cfg.divergence_factor) +
                                          " x initial at iteration " + std::to_string(it));
        if (rn <= threshold) {
            st.converged = true;
            break;
        }
    }
    return out;
}

double count_cycle_flops(const Hierarchy& H, int f_smooth_its) {
    double flops = 0.0;
    for (const Level& L : H.levels) {
        const auto n_f = static_cast<double>(L.A_ff.nrows);
        flops += 2.0 * static_cast<double>(L.R.nnz());
        if (L.A_fc.nnz() > 0) flops += 2.0 * static_cast<double>(L.A_fc.nnz()) + 2.0 * n_f;
        flops += smoother_flops(L);
        const double extra = 2.0 * static_cast<double>(L.A_ff.nnz()) + 2.0 * n_f + smoother_flops(L) + 2.0 * n_f;
        flops += static_cast<double>(f_smooth_its - 1) * extra;
    }
    if (H.coarse_solver)
        flops += application_flops(*H.coarse_solver, H.coarsest_A.nrows, H.coarsest_A.nnz());
    return flops;
}

double cycle_complexity(const Hierarchy& H, int f_smooth_its) {
    const double top = 2.0 * static_cast<double>(H.top_A.nnz());
    return top > 0.0 ? count_cycle_flops(H, f_smooth_its) / top : 0.0;
}

} // namespace airg
