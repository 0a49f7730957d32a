#ifndef AIRG_CYCLE_HPP
#define AIRG_CYCLE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "airg/hierarchy.hpp"

namespace airg {

struct SolveConfig {
    double rtol = 1e-10;
    double atol = 1e-50;
    int max_iters = 100;
    /// F-point smoothing passes per level per cycle.
    int f_smooth_its = 1;
    /// Abort once the residual exceeds this multiple of the initial residual.
    double divergence_factor = 1e8;

    void validate() const;
};

struct SolveStats {
    int iterations = 0;
    std::vector<double> residual_history; ///< ||b - A x_k||_2, k = 0..iterations
    bool converged = false;
    double cycle_complexity = 0.0;
    double storage_complexity = 0.0;
    double flops_per_cycle = 0.0;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int iteration, const std::string& what)
        : std::runtime_error(what), iteration_(iteration) {}
    [[nodiscard]] int iteration() const { return iteration_; }

private:
    int iteration_;
};

/// Approximate solution of A_level e = r by one V-cycle: restrict with R,
/// recurse (or apply the coarse polynomial), then F-point smoothing
///   e_f <- e_f + q(A_ff) (r_f - A_fc e_c - A_ff e_f),  starting from e_f = 0.
Vector vcycle(const Hierarchy& H, int level, std::span<const double> r, int f_smooth_its = 1);

/// Undamped Richardson x <- x + vcycle(b - A x). Convergence is tested on the
/// unpreconditioned residual against max(rtol * ref, atol), ref = ||b|| or the
/// initial residual norm when b = 0.
struct SolveResult {
    Vector x;
    SolveStats stats;
};
SolveResult richardson_solve(const Hierarchy& H, std::span<const double> b, std::span<const double> x0,
                             const SolveConfig& cfg);

/// FLOPs of one V-cycle (SpMV = 2 nnz, vector update = 2 n). Counts R r,
/// A_fc e_c, every smoother application including the A_ff e_f products of
/// repeated passes, and the coarse polynomial. The scatter is free.
double count_cycle_flops(const Hierarchy& H, int f_smooth_its = 1);

/// count_cycle_flops / (2 nnz(A_top)).
double cycle_complexity(const Hierarchy& H, int f_smooth_its = 1);

} // namespace airg

#endif
