// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "airg/advection.hpp"
#include "airg/cli.hpp"
#include "airg/cycle.hpp"
#include "airg/hierarchy.hpp"
#include "airg/random.hpp"
#include "oracles.hpp"

using namespace airg;
using oracle::Dense;
using oracle::DVec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failed checks with a message; the first few are reported.
struct Checker {
    Outcome out;
    int failures = 0;
    std::ostringstream notes;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        out.pass = false;
        if (failures++ < 3) notes << (failures > 1 ? "; " : "") << what;
    }
    Outcome finish(const std::string& summary) {
        out.detail = summary;
        if (failures > 0) out.detail += " | failed: " + notes.str() + (failures > 3 ? " ..." : "");
        return out;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel_residual(const CsrMatrix& A, const Vector& x, const Vector& b) {
    Vector r(b.size());
    residual(A, x, b, r);
    return norm2(r) / norm2(b);
}

CsrMatrix pi4(index_t n) { return build_advection_2d(AdvectionProblem::from_angle(n, n, std::numbers::pi / 4)).A; }

SetupConfig benchmark_defaults() {
    SetupConfig c;
    c.strong_threshold = 0.99;
    c.ddc_fraction = 0.01;
    c.ddc_its = 2;
    c.poly_order = 6;
    c.inverse_type = InverseType::arnoldi;
    c.matrix_free_polys = true;
    c.a_drop = 1e-6;
    c.a_lump = true;
    c.coarsest_poly_order = 100;
    c.coarsest_inverse_type = InverseType::newton;
    c.auto_truncate_tol = 1e-1;
    return c;
}

struct Solved {
    Hierarchy H;
    SolveStats stats;
};

Solved solve_zero_rhs(const CsrMatrix& A, const SetupConfig& cfg) {
    Solved s{setup(A, cfg), {}};
    const Vector b(static_cast<std::size_t>(A.nrows), 0.0), x0(b.size(), 1.0);
    s.stats = richardson_solve(s.H, b, x0, SolveConfig{}).stats;
    return s;
}

Outcome gmres_oracle() {
    Checker c;
    int compared = 0;
    double worst = 0.0;
    for (std::uint64_t k = 1; k <= 20; ++k) {
        const index_t n = 16 + static_cast<index_t>((k * 7) % 49); // 16..64
        const auto A = oracle::from_dense(oracle::random_diag_dominant(n, 0.15, 1.02, 100 + k));
        const auto b = random_unit_vector(n, k);
        const auto ref = oracle::gmres_residuals(oracle::to_dense(A), oracle::to_eigen(b), 8);
        for (int m = 2; m <= 8; ++m) {
            const auto p = gmres_poly_arnoldi(A, m - 1, k);
            const double got = rel_residual(A, apply_matrix_free(p, A, b), b);
            const double err = std::abs(got - ref[m]) / ref[m];
            worst = std::max(worst, err);
            ++compared;
            c.require(err <= 1e-10, fmt("n=%lld m=%d rel diff %.2e", static_cast<long long>(n), m, err));
        }
    }
    return c.finish(fmt("%d (matrix, m) pairs, worst relative difference %.2e", compared, worst));
}

Outcome newton_vs_arnoldi() {
    Checker c;
    double worst = 0.0;
    for (std::uint64_t k = 1; k <= 10; ++k) {
        const index_t n = 20 + static_cast<index_t>(k * 5);
        const auto A = oracle::from_dense(oracle::random_diag_dominant(n, 0.1, 1.1, 200 + k));
        const auto b = random_unit_vector(n, 300 + k);
        for (int order = 1; order <= 10; ++order) {
            NewtonOptions o;
            o.add_roots = false;
            const double ra = rel_residual(A, apply_matrix_free(gmres_poly_arnoldi(A, order, k), A, b), b);
            const double rn = rel_residual(A, apply_matrix_free(gmres_poly_newton(A, order, k, o), A, b), b);
            const double err = std::abs(ra - rn) / ra;
            worst = std::max(worst, err);
            c.require(err <= 1e-8, fmt("n=%lld order=%d rel diff %.2e", static_cast<long long>(n), order, err));
        }
    }

    // Order 100 on coarse matrices of the 256^2 problem: the untruncated
    // coarsest grid and the grid where truncation from level 8 stops.
    const auto A = pi4(256);
    SetupConfig full = benchmark_defaults();
    full.auto_truncate_tol = 0.0;
    SetupConfig trunc = benchmark_defaults();
    trunc.auto_truncate_start_level = 8;
    std::string coarse_notes;
    for (const auto* cfg : {&full, &trunc}) {
        const auto H = setup(A, *cfg);
        const auto& Ac = H.coarsest_A;
        const auto p = gmres_poly_newton(Ac, 100, 7);
        const auto b = random_unit_vector(Ac.nrows, 8);
        const auto x = apply_matrix_free(p, Ac, b);
        const bool finite = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
        const double r = rel_residual(Ac, x, b);
        c.require(finite, "non-finite order-100 application");
        c.require(r < 1e-1, fmt("order-100 residual %.2e on n=%lld", r, static_cast<long long>(Ac.nrows)));
        coarse_notes += fmt(" n_coarse=%lld residual %.1e;", static_cast<long long>(Ac.nrows), r);
    }
    return c.finish(fmt("orders 1..10 worst difference %.2e; order 100:%s", worst, coarse_notes.c_str()));
}

Outcome cyclic_reduction() {
    Checker c;
    std::string its;
    for (index_t n : {64, 1024, 4096}) {
        const auto A = build_advection_1d(n, 1.0);
        SetupConfig cfg = benchmark_defaults();
        cfg.strong_threshold = 0.5;
        cfg.poly_order = 1;
        const auto H = setup(A, cfg);
        const auto b = random_unit_vector(n, 11);
        const Vector x0(static_cast<std::size_t>(n), 1.0);
        const auto res = richardson_solve(H, b, x0, SolveConfig{});
        const auto ref = oracle::forward_substitution(A, b);
        double num = 0.0, den = 0.0;
        for (index_t i = 0; i < n; ++i) {
            num += std::pow(res.x[i] - ref[i], 2);
            den += ref[i] * ref[i];
        }
        const double err = std::sqrt(num / den);
        c.require(res.stats.converged && res.stats.iterations <= 2,
                  fmt("n=%lld took %d iterations", static_cast<long long>(n), res.stats.iterations));
        c.require(err <= 1e-10, fmt("n=%lld solution error %.2e", static_cast<long long>(n), err));
        its += fmt(" n=%lld: %d its, err %.1e;", static_cast<long long>(n), res.stats.iterations, err);
    }
    return c.finish(its);
}

Outcome ideal_restriction() {
    Checker c;
    double worst = 0.0;
    const std::vector<AdvectionProblem> problems = {
        AdvectionProblem::from_angle(12, 12, std::numbers::pi / 4),
        AdvectionProblem::from_angle(14, 10, std::atan(std::sqrt(0.5))),
        AdvectionProblem::from_angle(10, 18, 1.2),
    };
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const auto A = build_advection_2d(problems[k]).A;
        SetupConfig cfg = benchmark_defaults();
        cfg.strong_threshold = 0.0;
        cfg.a_drop = 0.0;
        cfg.auto_truncate_tol = 0.0;
        cfg.max_levels = 2;
        cfg.min_coarse_size = 1;
        cfg.seed = k + 1;
        const auto H = setup(A, cfg);
        const Level& L = H.levels.at(0);
        bool diagonal = true;
        for (index_t i = 0; i < L.A_ff.nrows; ++i)
            for (index_t j : L.A_ff.row_cols(i)) diagonal = diagonal && j == i;
        c.require(diagonal, "A_ff not diagonal at theta 0");

        // Dense coarse-grid correction with an exact coarse solve.
        const Dense Ad = oracle::to_dense(A), R = oracle::to_dense(L.R), P = oracle::to_dense(L.P);
        const Dense Ac = R * Ad * P;
        DVec e0(A.nrows);
        for (index_t i = 0; i < A.nrows; ++i) e0(i) = std::cos(0.3 + 1.7 * static_cast<double>(i));
        const DVec ec = Ac.partialPivLu().solve(R * (Ad * e0));
        const DVec e1 = e0 - P * ec;
        double cerr = 0.0;
        for (index_t i : L.split.c_set.indices()) cerr += e1(i) * e1(i);
        const double ratio = std::sqrt(cerr) / e0.norm();
        worst = std::max(worst, ratio);
        c.require(ratio < 1e-12, fmt("C-point error ratio %.2e", ratio));
    }
    return c.finish(fmt("%zu problems (n <= 180), worst C-point error ratio %.2e", problems.size(), worst));
}

Outcome scaled_convergence() {
    Checker c;
    std::vector<int> its;
    std::string notes;
    for (index_t n : {128, 256, 512}) {
        SetupConfig cfg = benchmark_defaults();
        cfg.ddc_its = 3;
        const auto s = solve_zero_rhs(pi4(n), cfg);
        its.push_back(s.stats.iterations);
        c.require(s.stats.converged && s.stats.iterations <= 12,
                  fmt("%lld^2 took %d iterations", static_cast<long long>(n), s.stats.iterations));
        notes += fmt(" %lld^2: %d its, %d levels, CC %.1f, SC %.2f;", static_cast<long long>(n), s.stats.iterations,
                     s.H.num_levels(), s.H.cycle_complexity, s.H.storage_complexity);
    }
    const int spread = *std::max_element(its.begin(), its.end()) - *std::min_element(its.begin(), its.end());
    c.require(spread <= 2, fmt("iteration spread %d", spread));
    return c.finish(notes);
}

Outcome truncation_neutrality() {
    Checker c;
    const auto A = pi4(256);
    SetupConfig off = benchmark_defaults();
    off.auto_truncate_tol = 0.0;
    SetupConfig on = benchmark_defaults();
    on.auto_truncate_start_level = 8;
    const auto full = solve_zero_rhs(A, off);
    const auto trunc = solve_zero_rhs(A, on);
    c.require(trunc.H.truncated_at.has_value(), "no truncation happened");
    c.require(trunc.stats.converged && trunc.stats.iterations == full.stats.iterations,
              fmt("iterations %d vs %d", trunc.stats.iterations, full.stats.iterations));
    c.require(trunc.H.num_levels() < full.H.num_levels(),
              fmt("levels %d vs %d", trunc.H.num_levels(), full.H.num_levels()));
    c.require(trunc.H.storage_complexity <= 1.03 * full.H.storage_complexity,
              fmt("storage %.3f vs %.3f", trunc.H.storage_complexity, full.H.storage_complexity));
    return c.finish(fmt("start level 8: its %d vs %d, levels %d vs %d, SC %.3f vs %.3f, CC %.1f vs %.1f",
                        trunc.stats.iterations, full.stats.iterations, trunc.H.num_levels(), full.H.num_levels(),
                        trunc.H.storage_complexity, full.H.storage_complexity, trunc.H.cycle_complexity,
                        full.H.cycle_complexity));
}

Outcome direction_dependence() {
    Checker c;
    AdvectionProblem p;
    p.nx = p.ny = 256;
    p.vx = std::sqrt(2.0 / 3.0);
    p.vy = std::sqrt(1.0 / 3.0);
    const auto A = build_advection_2d(p).A;
    SetupConfig slow = benchmark_defaults();
    slow.strong_threshold = 0.4;
    SetupConfig fast = benchmark_defaults();
    const auto s04 = solve_zero_rhs(A, slow);
    const auto s99 = solve_zero_rhs(A, fast);
    c.require(s04.stats.converged && s04.stats.iterations <= 12, fmt("theta 0.4 took %d", s04.stats.iterations));
    c.require(!s99.stats.converged || s99.stats.iterations > 12 || s99.stats.iterations > s04.stats.iterations,
              fmt("theta 0.99 took %d, theta 0.4 took %d", s99.stats.iterations, s04.stats.iterations));

    const auto Api = pi4(256);
    const auto g04 = setup(Api, slow).grid_complexity;
    const auto g99 = setup(Api, fast).grid_complexity;
    c.require(g04 > g99, fmt("grid complexity %.3f vs %.3f", g04, g99));
    return c.finish(fmt("skew: theta 0.4 %d its, theta 0.99 %d its%s; pi/4 grid complexity %.2f vs %.2f",
                        s04.stats.iterations, s99.stats.iterations, s99.stats.converged ? "" : " (not converged)",
                        g04, g99));
}

Outcome nair_comparison() {
    Checker c;
    std::vector<int> airg_its, nair_its;
    for (index_t n : {256, 512}) {
        const auto A = pi4(n);
        SetupConfig a = benchmark_defaults();
        SetupConfig b = benchmark_defaults();
        b.inverse_type = InverseType::neumann;
        const auto sa = solve_zero_rhs(A, a);
        const auto sb = solve_zero_rhs(A, b);
        c.require(sa.stats.converged, "AIRG did not converge");
        const int nb = sb.stats.converged ? sb.stats.iterations : SolveConfig{}.max_iters + 1;
        airg_its.push_back(sa.stats.iterations);
        nair_its.push_back(nb);
        c.require(nb >= sa.stats.iterations, fmt("%lld^2 nAIR %d < AIRG %d", static_cast<long long>(n), nb,
                                                 sa.stats.iterations));
    }
    const int ga = airg_its[1] - airg_its[0], gn = nair_its[1] - nair_its[0];
    c.require(gn >= ga, fmt("growth nAIR %d < AIRG %d", gn, ga));
    return c.finish(fmt("AIRG %d -> %d, nAIR %d -> %d", airg_its[0], airg_its[1], nair_its[0], nair_its[1]));
}

Outcome invariant_suites() {
    Checker c;
    int cases = 0;

    // CF splitting: independence and maximality on the symmetric strength graph.
    for (std::uint64_t seed = 1; seed <= 50; ++seed, ++cases) {
        Dense D = oracle::random_sparse(40, 40, 0.1, seed);
        for (index_t i = 0; i < 40; ++i) D(i, i) = 4.0;
        const auto A = oracle::from_dense(D);
        const auto G = strength_graph(A, 0.3);
        const auto s = pmisr(G, seed).split;
        const auto& S = G.symmetric_closure;
        for (index_t i = 0; i < 40; ++i) {
            bool has_f = false;
            for (index_t j : S.row_cols(i)) {
                if (j == i) continue;
                has_f = has_f || s.labels[j] == Mark::fine;
                if (s.labels[i] == Mark::fine) c.require(s.labels[j] != Mark::fine, "F-F strong edge");
            }
            if (s.labels[i] == Mark::coarse) c.require(has_f, "C point without F neighbour");
        }
    }

    // DDC: C stays C, |F| shrinks, the worst dominance ratio does not grow.
    for (std::uint64_t seed = 1; seed <= 30; ++seed, ++cases) {
        Dense D = oracle::random_sparse(50, 50, 0.15, seed);
        for (index_t i = 0; i < 50; ++i) D(i, i) = 4.0;
        const auto A = oracle::from_dense(D);
        auto split = pmisr(strength_graph(A, 0.1), seed).split;
        for (int pass = 0; pass < 3; ++pass) {
            const auto before = dominance_ratios(A, split);
            const auto next = ddc_pass(A, split, 0.1, 1000);
            for (index_t i = 0; i < 50; ++i)
                if (split.labels[i] == Mark::coarse) c.require(next.labels[i] == Mark::coarse, "DDC made C into F");
            const auto after = dominance_ratios(A, next);
            if (!before.empty() && !after.empty())
                c.require(*std::max_element(after.begin(), after.end()) <=
                              *std::max_element(before.begin(), before.end()),
                          "max dominance ratio grew");
            split = next;
        }
    }

    // Drop and lump conserves row sums.
    for (std::uint64_t seed = 1; seed <= 30; ++seed, ++cases) {
        const auto A = oracle::from_dense(oracle::random_sparse(12, 12, 0.6, seed));
        for (double tol : {0.05, 0.2, 0.6}) {
            const auto L = drop_and_lump(A, tol, true);
            const auto r0 = row_sums(A), r1 = row_sums(L);
            for (index_t i = 0; i < 12; ++i) {
                double scale = 1.0;
                for (double v : A.row_vals(i)) scale += std::abs(v);
                c.require(std::abs(r0[i] - r1[i]) <= 1e-14 * scale, "row sum changed");
            }
        }
    }

    // Fixed-sparsity assembly vs dense masked powers.
    for (std::uint64_t seed = 1; seed <= 20; ++seed, ++cases) {
        const Dense Dm = oracle::random_diag_dominant(20, 0.2, 1.5, seed);
        const auto A = oracle::from_dense(Dm);
        const auto mask = oracle::pattern_with_diagonal(A);
        const auto p = gmres_poly_arnoldi(A, 1 + static_cast<int>(seed % 6), seed);
        const Dense ref = oracle::masked_power_sum(Dm, p.coeffs, mask);
        const double diff = (oracle::to_dense(assemble_fixed_sparsity(p, A)) - ref).cwiseAbs().maxCoeff();
        c.require(diff <= 1e-12 * ref.cwiseAbs().maxCoeff(), fmt("assembly differs by %.2e", diff));
    }

    // FLOP model, hand count: diagonal matrix, single level, order-0 coarse solver.
    {
        ++cases;
        const auto D = CsrMatrix::diagonal(std::vector<double>{1, 2, 3, 4, 5, 6, 7});
        SetupConfig cfg;
        cfg.coarsest_poly_order = 0;
        const auto H = setup(D, cfg);
        c.require(H.num_levels() == 1, "diagonal case not single level");
        c.require(count_cycle_flops(H) == 2.0 * 7, "single-level FLOP count");
        c.require(cycle_complexity(H) == 1.0, "single-level cycle complexity");
    }
    return c.finish(fmt("%d property cases", cases));
}

Outcome determinism() {
    Checker c;
    SetupConfig cfg = benchmark_defaults();
    cfg.ddc_its = 3;
    const auto A = pi4(256);
    const auto a = solve_zero_rhs(A, cfg);
    const auto b = solve_zero_rhs(A, cfg);
    c.require(a.stats.iterations == b.stats.iterations, "iteration counts differ");
    c.require(a.stats.residual_history == b.stats.residual_history, "residual histories differ");
    c.require(cli::hierarchy_json(a.H).dump() == cli::hierarchy_json(b.H).dump(), "hierarchy summaries differ");
    return c.finish(fmt("%d iterations, %d levels, identical on both runs", a.stats.iterations, a.H.num_levels()));
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> body;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "GMRES polynomial matches textbook GMRES", 10, gmres_oracle},
        {2, "Newton and Arnoldi forms agree; order-100 coarse solve", 30, newton_vs_arnoldi},
        {3, "cyclic-reduction exactness in 1D", 10, cyclic_reduction},
        {4, "ideal restriction zeroes the C-point error", 5, ideal_restriction},
        {5, "near-constant iterations on pi/4 at 128^2..512^2", 300, scaled_convergence},
        {6, "truncation keeps the iteration count", 120, truncation_neutrality},
        {7, "direction dependence of the strong threshold", 300, direction_dependence},
        {8, "nAIR needs at least as many iterations as AIRG", 300, nair_comparison},
        {9, "invariant property suites", 60, invariant_suites},
        {10, "determinism of a full run", 120, determinism},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > cr.budget_seconds) {
            o.pass = false;
            o.detail += fmt(" | over the %.0f s budget", cr.budget_seconds);
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
