#ifndef AIRG_HIERARCHY_HPP
#define AIRG_HIERARCHY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airg/poly_inverse.hpp"
#include "airg/sparse_matrix.hpp"
#include "airg/strength_cf.hpp"

namespace airg {

enum class InverseType { arnoldi, neumann, newton };

std::string to_string(InverseType t);
InverseType parse_inverse_type(const std::string& s);

/// Raised for invalid or unsupported configuration values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SetupConfig {
    // CF splitting
    double strong_threshold = 0.99;
    double ddc_fraction = 0.01;
    int ddc_its = 2;
    index_t ddc_bins = 1000;
    int max_luby_loops = 0; // <= 0: unlimited

    // F-point approximate inverse, shared by the restrictor and the smoother
    int poly_order = 6;
    InverseType inverse_type = InverseType::arnoldi;
    bool matrix_free_polys = true;

    // Dropping
    double a_drop = 1e-6;
    bool a_lump = true;
    double r_drop = 0.0;

    // Coarse grid solver and truncation
    int coarsest_poly_order = 100;
    InverseType coarsest_inverse_type = InverseType::newton;
    double auto_truncate_tol = 1e-1; // <= 0 disables truncation
    int auto_truncate_start_level = -1; // < 0 disables truncation
    int max_levels = 60;
    index_t min_coarse_size = 16;

    std::uint64_t seed = 1;

    // Accepted only at their defaults; other values are rejected by validate().
    std::string smooth_type = "f";
    bool one_point_classical_prolong = true;
    int improve_z_its = 0;
    int improve_w_its = 0;
    int inverse_sparsity_order = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// One reduction level. R (n_C x n) and P (n x n_C) are stored in the level's
/// original unknown ordering: R = [Z I], P = [W; I] after permutation.
struct Level {
    CsrMatrix R;
    CsrMatrix P;
    CsrMatrix A_ff;
    CsrMatrix A_fc;
    /// Assembled fixed-sparsity inverse; kept only when smoothing is not matrix-free.
    std::optional<CsrMatrix> assembled_inverse;
    PolySolver f_smoother;
    CFSplit split;
    index_t n = 0;
    index_t nnz_A = 0;
    int luby_rounds = 0;
    std::vector<DdcPassStats> ddc_passes;
    /// Whether a tentative coarse solver was tested here and rejected.
    bool truncation_tested = false;
    double truncation_residual = -1.0;
};

struct SetupTimings {
    double cf_split = 0.0;
    double prolongator = 0.0;
    double polynomial = 0.0;
    double spgemm_R = 0.0;
    double spgemm_coarse = 0.0;
    double extract = 0.0;
    double drop = 0.0;
    double truncation = 0.0;
    double coarse_solver = 0.0;
    double total = 0.0;

    [[nodiscard]] double component_sum() const {
        return cf_split + prolongator + polynomial + spgemm_R + spgemm_coarse + extract + drop +
               truncation + coarse_solver;
    }
};

struct Hierarchy {
    std::vector<Level> levels;
    CsrMatrix top_A;
    CsrMatrix coarsest_A;
    /// Absent only when the coarsest level has no unknowns.
    std::optional<PolySolver> coarse_solver;
    double cycle_complexity = 1.0;
    double storage_complexity = 1.0;
    double grid_complexity = 1.0;
    std::optional<int> truncated_at;
    /// Residual of the accepted tentative coarse solver on its test vector.
    double truncation_residual = -1.0;
    std::vector<std::string> warnings;
    SetupTimings timings;
    SetupConfig config;

    [[nodiscard]] int num_levels() const { return static_cast<int>(levels.size()) + 1; }
    [[nodiscard]] index_t level_size(int level) const {
        return level < static_cast<int>(levels.size()) ? levels[level].n : coarsest_A.nrows;
    }
};

struct RestrictionParts {
    CsrMatrix R;
    CsrMatrix A_ff;
    CsrMatrix A_fc;
    PolySolver f_smoother;
    CsrMatrix assembled_inverse;
};

/// Z = -A_cf Ahat_ff^{-1}, with Ahat_ff^{-1} the fixed-sparsity assembly of the
/// same polynomial used matrix-free as the F smoother. Z entries are dropped
/// with cfg.r_drop and discarded, never lumped.
RestrictionParts build_restriction(const CsrMatrix& A, const CFSplit& split, const SetupConfig& cfg,
                                   std::uint64_t poly_seed, SetupTimings* timings = nullptr);

/// One-point prolongation: each F row takes a single 1 in the column of its
/// largest-magnitude C coupling (lowest index on ties). F rows with no
/// off-diagonal couplings at all get an empty row. Throws std::domain_error
/// when an F row has couplings but none to a C point.
CsrMatrix build_prolongation(const CsrMatrix& A, const CFSplit& split);

/// R A P followed by drop_and_lump(cfg.a_drop, cfg.a_lump).
CsrMatrix coarse_matrix(const CsrMatrix& A, const CsrMatrix& R, const CsrMatrix& P,
                        const SetupConfig& cfg, SetupTimings* timings = nullptr);

/// Coarse-grid solver of the configured type and order.
PolySolver build_coarse_solver(const CsrMatrix& A, const SetupConfig& cfg, std::uint64_t seed);

struct TruncationTest {
    std::optional<PolySolver> solver; ///< set when the test passed
    double residual = -1.0;           ///< ||b - A q(A) b|| / ||b||, -1 on failure
    std::string warning;
};

/// Builds a tentative coarse solver and applies it once to an independent
/// random vector; accepts it when the relative residual is <= auto_truncate_tol.
TruncationTest try_truncate(const CsrMatrix& A, const SetupConfig& cfg, int level);

Hierarchy setup(const CsrMatrix& A, const SetupConfig& cfg);

/// Storage complexity recomputed from per-level nnz counts.
double storage_complexity(const Hierarchy& H);

} // namespace airg

#endif
