#include "airg/hierarchy.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "airg/cycle.hpp"
#include "airg/random.hpp"

namespace airg {

std::string to_string(InverseType t) {
    switch (t) {
    case InverseType::arnoldi: return "arnoldi";
    case InverseType::neumann: return "neumann";
    case InverseType::newton: return "newton";
    }
    return "unknown";
}

InverseType parse_inverse_type(const std::string& s) {
    if (s == "arnoldi") return InverseType::arnoldi;
    if (s == "neumann") return InverseType::neumann;
    if (s == "newton") return InverseType::newton;
    throw ConfigError("unknown inverse type '" + s + "' (expected arnoldi, neumann or newton)");
}

void SetupConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(strong_threshold >= 0.0 && strong_threshold <= 1.0)) fail("strong_threshold must lie in [0, 1]");
    if (!(ddc_fraction > 0.0 && ddc_fraction < 1.0)) fail("ddc_fraction must lie in (0, 1)");
    if (ddc_its < 0) fail("ddc_its must be >= 0");
    if (ddc_bins < 1) fail("ddc_bins must be >= 1");
    if (poly_order < 0) fail("poly_order must be >= 0");
    if (inverse_type == InverseType::newton)
        fail("inverse_type newton cannot be assembled for the restrictor; use arnoldi or neumann");
    if (!(a_drop >= 0.0)) fail("a_drop must be >= 0");
    if (!(r_drop >= 0.0)) fail("r_drop must be >= 0");
    if (coarsest_poly_order < 0) fail("coarsest_poly_order must be >= 0");
    if (std::isnan(auto_truncate_tol)) fail("auto_truncate_tol is NaN");
    if (max_levels < 1) fail("max_levels must be >= 1");
    if (min_coarse_size < 1) fail("min_coarse_size must be >= 1");
    if (smooth_type != "f")
        fail("smooth_type '" + smooth_type + "' is not supported: only F-point smoothing ('f') is implemented");
    if (!one_point_classical_prolong)
        fail("approximate ideal prolongation is not supported: one_point_classical_prolong must be 1");
    if (improve_z_its != 0 || improve_w_its != 0)
        fail("improve_z_its / improve_w_its are not supported and must be 0");
    if (inverse_sparsity_order != 1)
        fail("inverse_sparsity_order other than 1 is not supported");
}

namespace {

using clock_type = std::chrono::steady_clock;

class ScopedTimer {
public:
    explicit ScopedTimer(double* sink) : sink_(sink), start_(clock_type::now()) {}
    ~ScopedTimer() {
        if (sink_) *sink_ += std::chrono::duration<double>(clock_type::now() - start_).count();
    }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    double* sink_;
    clock_type::time_point start_;
};

double* field(SetupTimings* t, double SetupTimings::*member) {
    return t ? &(t->*member) : nullptr;
}

PolySolver build_poly(InverseType type, const CsrMatrix& A, int order, std::uint64_t seed) {
    switch (type) {
    case InverseType::arnoldi: return gmres_poly_arnoldi(A, order, seed);
    case InverseType::neumann: return neumann_poly(A, order);
    case InverseType::newton: return gmres_poly_newton(A, order, seed);
    }
    throw ConfigError("unknown inverse type");
}

} // namespace

RestrictionParts build_restriction(const CsrMatrix& A, const CFSplit& split, const SetupConfig& cfg,
                                   std::uint64_t poly_seed, SetupTimings* timings) {
    RestrictionParts out;
    CsrMatrix A_cf;
    {
        ScopedTimer t(field(timings, &SetupTimings::extract));
        out.A_ff = extract(A, split.f_set, split.f_set);
        out.A_fc = extract(A, split.f_set, split.c_set);
        A_cf = extract(A, split.c_set, split.f_set);
    }
    {
        ScopedTimer t(field(timings, &SetupTimings::polynomial));
        out.f_smoother = build_poly(cfg.inverse_type, out.A_ff, cfg.poly_order, poly_seed);
        out.assembled_inverse = assemble_fixed_sparsity(out.f_smoother, out.A_ff);
    }
    CsrMatrix Z;
    {
        ScopedTimer t(field(timings, &SetupTimings::spgemm_R));
        Z = scale(spgemm(A_cf, out.assembled_inverse), -1.0);
    }
    {
        ScopedTimer t(field(timings, &SetupTimings::drop));
        if (cfg.r_drop > 0.0) Z = drop_and_lump(Z, cfg.r_drop, false);
    }

    // R = [Z I] scattered back to the original ordering; both pieces are
    // sorted, so each row is a merge of Z's row and one identity entry.
    ScopedTimer t(field(timings, &SetupTimings::spgemm_R));
    const index_t n_c = split.n_coarse();
    CsrMatrix R(n_c, split.size());
    R.col_indices.reserve(static_cast<std::size_t>(Z.nnz() + n_c));
    R.values.reserve(R.col_indices.capacity());
    for (index_t c = 0; c < n_c; ++c) {
        const index_t self = split.c_set[c];
        bool placed = false;
        for (index_t k = Z.row_offsets[c]; k < Z.row_offsets[c + 1]; ++k) {
            const index_t col = split.f_set[Z.col_indices[k]];
            if (!placed && col > self) {
                R.col_indices.push_back(self);
                R.values.push_back(1.0);
                placed = true;
            }
            R.col_indices.push_back(col);
            R.values.push_back(Z.values[k]);
        }
        if (!placed) {
            R.col_indices.push_back(self);
            R.values.push_back(1.0);
        }
        R.row_offsets[c + 1] = static_cast<index_t>(R.col_indices.size());
    }
    out.R = std::move(R);
    return out;
}

CsrMatrix build_prolongation(const CsrMatrix& A, const CFSplit& split) {
    if (!A.is_square() || A.nrows != split.size())
        throw DimensionError("build_prolongation: splitting does not match matrix");
    const auto c_map = split.c_set.inverse_map();
    CsrMatrix P(A.nrows, split.n_coarse());
    for (index_t i = 0; i < A.nrows; ++i) {
        if (split.labels[i] == Mark::coarse) {
            P.col_indices.push_back(c_map[i]);
            P.values.push_back(1.0);
        } else {
            index_t best = -1;
            double best_mag = 0.0;
            bool coupled = false;
            const auto cols = A.row_cols(i);
            const auto vals = A.row_vals(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] == i || vals[k] == 0.0) continue;
                coupled = true;
                if (split.labels[cols[k]] != Mark::coarse) continue;
                // Columns ascend, so strict > keeps the lowest index on ties.
                if (std::abs(vals[k]) > best_mag) {
                    best_mag = std::abs(vals[k]);
                    best = cols[k];
                }
            }
            if (best >= 0) {
                P.col_indices.push_back(c_map[best]);
                P.values.push_back(1.0);
            } else if (coupled) {
                throw std::domain_error("F point " + std::to_string(i) +
                                        " has no C coupling: splitting is invalid for one-point prolongation");
            }
        }
        P.row_offsets[i + 1] = static_cast<index_t>(P.col_indices.size());
    }
    return P;
}

CsrMatrix coarse_matrix(const CsrMatrix& A, const CsrMatrix& R, const CsrMatrix& P,
                        const SetupConfig& cfg, SetupTimings* timings) {
    CsrMatrix Ac;
    {
        ScopedTimer t(field(timings, &SetupTimings::spgemm_coarse));
        Ac = spgemm(R, spgemm(A, P));
    }
    ScopedTimer t(field(timings, &SetupTimings::drop));
    return drop_and_lump(Ac, cfg.a_drop, cfg.a_lump);
}

PolySolver build_coarse_solver(const CsrMatrix& A, const SetupConfig& cfg, std::uint64_t seed) {
    return build_poly(cfg.coarsest_inverse_type, A, cfg.coarsest_poly_order, seed);
}

TruncationTest try_truncate(const CsrMatrix& A, const SetupConfig& cfg, int level) {
    TruncationTest out;
    try {
        auto solver = build_coarse_solver(A, cfg, derive_seed(cfg.seed, level, SeedPurpose::coarse_poly));
        const auto b = random_unit_vector(A.nrows, derive_seed(cfg.seed, level, SeedPurpose::truncation_rhs));
        const auto x = apply_matrix_free(solver, A, b);
        Vector r(b.size());
        residual(A, x, b, r);
        const double rel = norm2(r) / norm2(b);
        if (!std::isfinite(rel)) {
            out.warning = "level " + std::to_string(level) + ": tentative coarse solver produced a non-finite residual";
            return out;
        }
        out.residual = rel;
        if (rel <= cfg.auto_truncate_tol) out.solver = std::move(solver);
    } catch (const std::exception& e) {
        out.warning = "level " + std::to_string(level) + ": tentative coarse solver failed: " + e.what();
    }
    return out;
}

double storage_complexity(const Hierarchy& H) {
    const double top = static_cast<double>(H.top_A.nnz());
    if (top == 0.0) return 1.0;
    double total = top;
    for (const auto& L : H.levels) {
        total += static_cast<double>(L.A_ff.nnz() + L.A_fc.nnz() + L.R.nnz() + L.P.nnz());
        if (L.assembled_inverse) total += static_cast<double>(L.assembled_inverse->nnz());
    }
    if (!H.levels.empty()) total += static_cast<double>(H.coarsest_A.nnz());
    return total / top;
}

Hierarchy setup(const CsrMatrix& A, const SetupConfig& cfg) {
    cfg.validate();
    if (!A.is_square()) throw DimensionError("setup: matrix must be square");
    const auto setup_start = clock_type::now();

    Hierarchy H;
    H.config = cfg;
    H.top_A = A;
    SetupTimings& tm = H.timings;

    CsrMatrix current = A;
    for (int level = 0;; ++level) {
        const index_t n = current.nrows;
        const bool last_allowed = level + 1 >= cfg.max_levels;
        if (n <= cfg.min_coarse_size || last_allowed) {
            if (last_allowed && n > cfg.min_coarse_size)
                H.warnings.push_back("max_levels (" + std::to_string(cfg.max_levels) +
                                     ") reached with " + std::to_string(n) + " unknowns on the coarsest level");
            break;
        }
        if (cfg.auto_truncate_tol > 0.0 && cfg.auto_truncate_start_level >= 0 &&
            level >= cfg.auto_truncate_start_level) {
            TruncationTest test;
            {
                ScopedTimer t(&tm.truncation);
                test = try_truncate(current, cfg, level);
            }
            if (!test.warning.empty()) H.warnings.push_back(test.warning);
            if (test.solver) {
                H.truncated_at = level;
                H.truncation_residual = test.residual;
                H.coarse_solver = std::move(test.solver);
                break;
            }
            // Remembered on the level built below.
            H.levels.emplace_back();
            H.levels.back().truncation_tested = true;
            H.levels.back().truncation_residual = test.residual;
        } else {
            H.levels.emplace_back();
        }

        Level& L = H.levels.back();
        CfSplitResult cf;
        {
            ScopedTimer t(&tm.cf_split);
            CfOptions opts;
            opts.strong_threshold = cfg.strong_threshold;
            opts.ddc_fraction = cfg.ddc_fraction;
            opts.ddc_its = cfg.ddc_its;
            opts.ddc_bins = cfg.ddc_bins;
            opts.max_luby_loops = cfg.max_luby_loops;
            opts.seed = derive_seed(cfg.seed, level, SeedPurpose::cf_split);
            cf = cf_split(current, opts);
        }
        if (cf.split.n_fine() == 0)
            throw std::runtime_error("level " + std::to_string(level) + ": splitting produced no F points");

        auto parts = build_restriction(current, cf.split, cfg,
                                       derive_seed(cfg.seed, level, SeedPurpose::smoother_poly), &tm);
        {
            ScopedTimer t(&tm.prolongator);
            L.P = build_prolongation(current, cf.split);
        }
        CsrMatrix next = coarse_matrix(current, parts.R, L.P, cfg, &tm);

        L.R = std::move(parts.R);
        L.A_ff = std::move(parts.A_ff);
        L.A_fc = std::move(parts.A_fc);
        L.f_smoother = std::move(parts.f_smoother);
        if (!cfg.matrix_free_polys) L.assembled_inverse = std::move(parts.assembled_inverse);
        L.split = std::move(cf.split);
        L.luby_rounds = cf.luby_rounds;
        L.ddc_passes = std::move(cf.passes);
        L.n = n;
        L.nnz_A = current.nnz();

        current = std::move(next);
        if (current.nrows == 0) break;
    }

    H.coarsest_A = std::move(current);
    if (!H.coarse_solver && H.coarsest_A.nrows > 0) {
        ScopedTimer t(&tm.coarse_solver);
        H.coarse_solver = build_coarse_solver(
            H.coarsest_A, cfg, derive_seed(cfg.seed, H.num_levels() - 1, SeedPurpose::coarse_poly));
    }

    double sizes = 0.0;
    for (int l = 0; l < H.num_levels(); ++l) sizes += static_cast<double>(H.level_size(l));
    H.grid_complexity = A.nrows > 0 ? sizes / static_cast<double>(A.nrows) : 1.0;
    H.storage_complexity = storage_complexity(H);
    H.cycle_complexity = cycle_complexity(H, 1);
    tm.total = std::chrono::duration<double>(clock_type::now() - setup_start).count();
    return H;
}

} // namespace airg
