#include "airg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "airg/advection.hpp"
#include "airg/matrix_market.hpp"

namespace airg::cli {

using json = nlohmann::ordered_json;

AdvectionProblem ProblemSpec::resolve() const {
    if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
    if (n < 1) throw ConfigError("n must be >= 1");
    AdvectionProblem p;
    p.nx = nx > 0 ? nx : n;
    if (dim == 1) {
        if (angle) throw ConfigError("angle applies to 2D problems only");
        p.ny = 0;
        p.vx = vx;
        p.vy = 0.0;
    } else if (angle) {
        if (!(*angle >= 0.0 && *angle <= std::numbers::pi / 2))
            throw ConfigError("angle must lie in [0, pi/2]");
        p = AdvectionProblem::from_angle(p.nx, ny > 0 ? ny : n, *angle);
    } else {
        p.ny = ny > 0 ? ny : n;
        p.vx = vx;
        p.vy = vy;
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

const std::vector<FlagInfo>& config_flag_table() {
    static const std::vector<FlagInfo> table = {
        {"--strong-threshold", "setup.strong_threshold", "strength-of-connection threshold theta"},
        {"--ddc-fraction", "setup.ddc_fraction", "fraction of F points converted per DDC pass"},
        {"--ddc-its", "setup.ddc_its", "number of DDC passes"},
        {"--ddc-bins", "setup.ddc_bins", "histogram bins used by DDC"},
        {"--max-luby-loops", "setup.max_luby_loops", "cap on PMISR rounds (<= 0: unlimited)"},
        {"--poly-order", "setup.poly_order", "F-point polynomial order"},
        {"--inverse-type", "setup.inverse_type", "F-point inverse: arnoldi (AIRG) or neumann (nAIR)"},
        {"--matrix-free-polys", "setup.matrix_free_polys", "apply the F smoother matrix-free"},
        {"--a-drop", "setup.a_drop", "relative drop tolerance on coarse matrices"},
        {"--a-lump", "setup.a_lump", "lump dropped coarse entries onto the diagonal"},
        {"--r-drop", "setup.r_drop", "relative drop tolerance on Z"},
        {"--coarsest-poly-order", "setup.coarsest_poly_order", "coarse-grid polynomial order"},
        {"--coarsest-inverse-type", "setup.coarsest_inverse_type", "coarse-grid inverse: newton, arnoldi or neumann"},
        {"--auto-truncate-tol", "setup.auto_truncate_tol", "truncation residual tolerance (<= 0: off)"},
        {"--auto-truncate-start-level", "setup.auto_truncate_start_level", "first level tested for truncation (< 0: off)"},
        {"--max-levels", "setup.max_levels", "maximum number of levels"},
        {"--min-coarse-size", "setup.min_coarse_size", "stop coarsening at or below this size"},
        {"--seed", "setup.seed", "root random seed"},
        {"--smooth-type", "setup.smooth_type", "smoothing pattern (only f)"},
        {"--one-point-classical-prolong", "setup.one_point_classical_prolong", "one-point prolongation (only true)"},
        {"--improve-z-its", "setup.improve_z_its", "Z improvement iterations (only 0)"},
        {"--improve-w-its", "setup.improve_w_its", "W improvement iterations (only 0)"},
        {"--inverse-sparsity-order", "setup.inverse_sparsity_order", "matrix power giving the assembled sparsity (only 1)"},
        {"--rtol", "solve.rtol", "relative residual tolerance"},
        {"--atol", "solve.atol", "absolute residual tolerance"},
        {"--max-iters", "solve.max_iters", "maximum Richardson iterations"},
        {"--f-smooth-its", "solve.f_smooth_its", "F smoothing passes per level"},
        {"--divergence-factor", "solve.divergence_factor", "abort when the residual grows by this factor"},
    };
    return table;
}

namespace {

template <class F>
void add_inverse_type(CLI::App& app, const std::string& flag, F assign, const std::string& desc,
                      InverseType def) {
    app.add_option_function<std::string>(
           flag,
           [assign](const std::string& s) {
               try {
                   assign(parse_inverse_type(s));
               } catch (const ConfigError& e) {
                   throw CLI::ValidationError(e.what());
               }
           },
           desc)
        ->default_str(to_string(def));
}

std::string describe(const std::string& flag) {
    for (const auto& f : config_flag_table())
        if (f.flag == flag) return f.description;
    return {};
}

} // namespace

void register_options(CLI::App& app, RunConfig& cfg) {
    auto& p = cfg.problem;
    app.add_option("--dim", p.dim, "problem dimension (1 or 2)")->capture_default_str();
    app.add_option("--n", p.n, "cells per dimension")->capture_default_str();
    app.add_option("--nx", p.nx, "cells in x (overrides --n)");
    app.add_option("--ny", p.ny, "cells in y (overrides --n)");
    app.add_option("--vx", p.vx, "velocity x component")->capture_default_str();
    app.add_option("--vy", p.vy, "velocity y component")->capture_default_str();
    app.add_option_function<double>("--angle", [&p](double a) { p.angle = a; },
                                    "velocity angle in radians; overrides --vx/--vy");
    app.add_option("--sweep", cfg.sweep, "run once per listed n")->delimiter(',');

    auto& s = cfg.setup;
    auto opt = [&](const std::string& flag, auto& field) {
        return app.add_option(flag, field, describe(flag))->capture_default_str();
    };
    auto bool_flag = [&](const std::string& flag, bool& field) {
        return app.add_flag(flag + ",!--no-" + flag.substr(2), field, describe(flag))
            ->capture_default_str();
    };
    opt("--strong-threshold", s.strong_threshold);
    opt("--ddc-fraction", s.ddc_fraction);
    opt("--ddc-its", s.ddc_its);
    opt("--ddc-bins", s.ddc_bins);
    opt("--max-luby-loops", s.max_luby_loops);
    opt("--poly-order", s.poly_order);
    add_inverse_type(app, "--inverse-type", [&s](InverseType t) { s.inverse_type = t; },
                     describe("--inverse-type"), s.inverse_type);
    bool_flag("--matrix-free-polys", s.matrix_free_polys);
    opt("--a-drop", s.a_drop);
    bool_flag("--a-lump", s.a_lump);
    opt("--r-drop", s.r_drop);
    opt("--coarsest-poly-order", s.coarsest_poly_order);
    add_inverse_type(app, "--coarsest-inverse-type", [&s](InverseType t) { s.coarsest_inverse_type = t; },
                     describe("--coarsest-inverse-type"), s.coarsest_inverse_type);
    opt("--auto-truncate-tol", s.auto_truncate_tol);
    opt("--auto-truncate-start-level", s.auto_truncate_start_level);
    opt("--max-levels", s.max_levels);
    opt("--min-coarse-size", s.min_coarse_size);
    opt("--seed", s.seed);
    opt("--smooth-type", s.smooth_type);
    bool_flag("--one-point-classical-prolong", s.one_point_classical_prolong);
    opt("--improve-z-its", s.improve_z_its);
    opt("--improve-w-its", s.improve_w_its);
    opt("--inverse-sparsity-order", s.inverse_sparsity_order);

    auto& v = cfg.solve;
    opt("--rtol", v.rtol);
    opt("--atol", v.atol);
    opt("--max-iters", v.max_iters);
    opt("--f-smooth-its", v.f_smooth_its);
    opt("--divergence-factor", v.divergence_factor);

    app.add_option("--solves", cfg.solves, "solves per run; timings come from the last")->capture_default_str();
    app.add_flag("--compare-nair", cfg.compare_nair, "paired arnoldi/neumann runs on each problem");
    auto& o = cfg.out;
    app.add_option("--json", o.json, "write the JSON report here");
    app.add_option("--history-csv", o.history_csv, "write residual histories as CSV");
    app.add_option("--setup-csv", o.setup_csv, "write the setup timing breakdown as CSV");
    app.add_option("--records-csv", o.records_csv, "write one summary row per run as CSV");
    app.add_option("--export-matrix", o.export_matrix, "write the top-grid matrix (Matrix Market)");
    app.add_option("--export-levels", o.export_levels, "write every level's R, P, A_ff, A_fc into this directory");
    app.add_option("--cf-dump", o.cf_dump, "write per-level CF labels and dominance ratios as CSV");
    app.add_option("--ddc-histogram", o.ddc_histogram, "write per-level DDC ratio histograms as CSV");
    app.add_option("--poly-json", o.poly_json, "write polynomial coefficients and roots as JSON");
    app.add_flag("--quiet,-q", cfg.quiet, "no summary lines on stdout");
}

json config_json(const SetupConfig& c) {
    json j;
    j["strong_threshold"] = c.strong_threshold;
    j["ddc_fraction"] = c.ddc_fraction;
    j["ddc_its"] = c.ddc_its;
    j["ddc_bins"] = c.ddc_bins;
    j["max_luby_loops"] = c.max_luby_loops;
    j["poly_order"] = c.poly_order;
    j["inverse_type"] = to_string(c.inverse_type);
    j["matrix_free_polys"] = c.matrix_free_polys;
    j["a_drop"] = c.a_drop;
    j["a_lump"] = c.a_lump;
    j["r_drop"] = c.r_drop;
    j["coarsest_poly_order"] = c.coarsest_poly_order;
    j["coarsest_inverse_type"] = to_string(c.coarsest_inverse_type);
    j["auto_truncate_tol"] = c.auto_truncate_tol;
    j["auto_truncate_start_level"] = c.auto_truncate_start_level;
    j["max_levels"] = c.max_levels;
    j["min_coarse_size"] = c.min_coarse_size;
    j["seed"] = c.seed;
    j["smooth_type"] = c.smooth_type;
    j["one_point_classical_prolong"] = c.one_point_classical_prolong;
    j["improve_z_its"] = c.improve_z_its;
    j["improve_w_its"] = c.improve_w_its;
    j["inverse_sparsity_order"] = c.inverse_sparsity_order;
    return j;
}

json config_json(const SolveConfig& c) {
    json j;
    j["rtol"] = c.rtol;
    j["atol"] = c.atol;
    j["max_iters"] = c.max_iters;
    j["f_smooth_its"] = c.f_smooth_its;
    j["divergence_factor"] = c.divergence_factor;
    return j;
}

namespace {

json solver_summary(const PolySolver& p) {
    json j;
    j["kind"] = to_string(p.kind);
    j["order"] = p.order;
    j["effective_order"] = p.effective_order;
    j["added_roots"] = p.added_roots;
    j["applied_degree"] = p.applied_degree();
    j["generating_residual"] = p.generating_residual;
    return j;
}

json problem_json(const AdvectionProblem& p) {
    json j;
    j["dim"] = p.ny == 0 ? 1 : 2;
    j["nx"] = p.nx;
    j["ny"] = p.ny;
    j["n"] = p.size();
    j["vx"] = p.vx;
    j["vy"] = p.vy;
    return j;
}

} // namespace

json hierarchy_json(const Hierarchy& H) {
    json j;
    j["num_levels"] = H.num_levels();
    j["grid_complexity"] = H.grid_complexity;
    j["storage_complexity"] = H.storage_complexity;
    j["cycle_complexity"] = H.cycle_complexity;
    j["truncated_at"] = H.truncated_at ? json(*H.truncated_at) : json(nullptr);
    j["truncation_residual"] = H.truncation_residual;
    j["top"] = {{"n", H.top_A.nrows}, {"nnz", H.top_A.nnz()}};
    json levels = json::array();
    for (std::size_t l = 0; l < H.levels.size(); ++l) {
        const Level& L = H.levels[l];
        json lj;
        lj["level"] = l;
        lj["n"] = L.n;
        lj["nnz_A"] = L.nnz_A;
        lj["n_fine"] = L.split.n_fine();
        lj["n_coarse"] = L.split.n_coarse();
        lj["nnz_R"] = L.R.nnz();
        lj["nnz_P"] = L.P.nnz();
        lj["nnz_A_ff"] = L.A_ff.nnz();
        lj["nnz_A_fc"] = L.A_fc.nnz();
        lj["nnz_assembled_inverse"] = L.assembled_inverse ? L.assembled_inverse->nnz() : 0;
        lj["luby_rounds"] = L.luby_rounds;
        lj["smoother"] = solver_summary(L.f_smoother);
        json passes = json::array();
        for (const auto& ps : L.ddc_passes)
            passes.push_back({{"n_fine_before", ps.n_fine_before},
                              {"n_converted", ps.n_converted},
                              {"min_ratio", ps.min_ratio},
                              {"max_ratio", ps.max_ratio},
                              {"cut", ps.cut}});
        lj["ddc_passes"] = std::move(passes);
        lj["truncation_tested"] = L.truncation_tested;
        lj["truncation_residual"] = L.truncation_residual;
        levels.push_back(std::move(lj));
    }
    j["levels"] = std::move(levels);
    json coarse;
    coarse["level"] = H.levels.size();
    coarse["n"] = H.coarsest_A.nrows;
    coarse["nnz"] = H.coarsest_A.nnz();
    coarse["solver"] = H.coarse_solver ? solver_summary(*H.coarse_solver) : json(nullptr);
    j["coarsest"] = std::move(coarse);
    j["warnings"] = H.warnings;
    return j;
}

json solve_json(const SolveStats& s) {
    json j;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["cycle_complexity"] = s.cycle_complexity;
    j["storage_complexity"] = s.storage_complexity;
    j["flops_per_cycle"] = s.flops_per_cycle;
    j["residual_history"] = s.residual_history;
    return j;
}

json poly_json(const PolySolver& p) {
    json j = solver_summary(p);
    j["coeffs"] = p.coeffs;
    json roots = json::array();
    for (const auto& r : p.roots) roots.push_back({r.real(), r.imag()});
    j["roots"] = std::move(roots);
    j["inv_diag_size"] = p.inv_diag.size();
    return j;
}

json timings_json(const SetupTimings& t) {
    json j;
    j["cf_split"] = t.cf_split;
    j["prolongator"] = t.prolongator;
    j["polynomial"] = t.polynomial;
    j["spgemm_R"] = t.spgemm_R;
    j["spgemm_coarse"] = t.spgemm_coarse;
    j["extract"] = t.extract;
    j["drop"] = t.drop;
    j["truncation"] = t.truncation;
    j["coarse_solver"] = t.coarse_solver;
    j["total"] = t.total;
    return j;
}

RunRecord run_one(const AdvectionProblem& problem, const SetupConfig& setup_cfg, const SolveConfig& solve_cfg,
                  int solves, const std::string& label) {
    RunRecord rec;
    rec.label = label;
    rec.problem = problem;
    const auto sys = build_advection_2d(problem);
    rec.hierarchy = setup(sys.A, setup_cfg);
    const Vector x0(sys.rhs.size(), 1.0);
    for (int k = 0; k < std::max(solves, 1); ++k) {
        const auto start = std::chrono::steady_clock::now();
        try {
            rec.stats = richardson_solve(rec.hierarchy, sys.rhs, x0, solve_cfg).stats;
            rec.error.clear();
        } catch (const DivergenceError& e) {
            rec.stats = SolveStats{};
            rec.stats.iterations = e.iteration();
            rec.stats.cycle_complexity = rec.hierarchy.cycle_complexity;
            rec.stats.storage_complexity = rec.hierarchy.storage_complexity;
            rec.stats.flops_per_cycle = count_cycle_flops(rec.hierarchy, solve_cfg.f_smooth_its);
            rec.error = e.what();
        }
        rec.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return rec;
}

json report_json(const RunConfig& cfg, const std::vector<RunRecord>& runs) {
    json j;
    j["schema_version"] = json_schema_version;
    j["config"] = {{"setup", config_json(cfg.setup)},
                   {"solve", config_json(cfg.solve)},
                   {"solves", cfg.solves},
                   {"compare_nair", cfg.compare_nair}};
    json rj = json::array();
    json tj = json::array();
    for (const auto& r : runs) {
        json one;
        one["label"] = r.label;
        one["problem"] = problem_json(r.problem);
        one["hierarchy"] = hierarchy_json(r.hierarchy);
        one["solve"] = solve_json(r.stats);
        one["error"] = r.error.empty() ? json(nullptr) : json(r.error);
        rj.push_back(std::move(one));
        tj.push_back({{"label", r.label},
                      {"n", r.problem.size()},
                      {"setup", timings_json(r.hierarchy.timings)},
                      {"solve_seconds", r.solve_seconds}});
    }
    j["runs"] = std::move(rj);
    if (cfg.compare_nair) {
        json cj = json::array();
        for (const auto& a : runs) {
            if (a.label != "airg") continue;
            for (const auto& b : runs)
                if (b.label == "nair" && b.problem.size() == a.problem.size())
                    cj.push_back({{"n", a.problem.size()},
                                  {"airg_iterations", a.stats.iterations},
                                  {"nair_iterations", b.stats.iterations},
                                  {"nair_at_least_airg", b.stats.iterations >= a.stats.iterations}});
        }
        j["comparison"] = std::move(cj);
    }
    j["timings"] = std::move(tj);
    return j;
}

namespace {

std::vector<const RunRecord*> sorted(const std::vector<RunRecord>& runs) {
    std::vector<const RunRecord*> out;
    for (const auto& r : runs) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const RunRecord* a, const RunRecord* b) {
        if (a->problem.size() != b->problem.size()) return a->problem.size() < b->problem.size();
        return a->label < b->label;
    });
    return out;
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

} // namespace

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
    out << "label,n,nx,ny,iterations,converged,levels,truncated_at,grid_complexity,storage_complexity,"
           "cycle_complexity,final_residual,setup_seconds,solve_seconds\n";
    for (const RunRecord* r : sorted(runs)) {
        const auto& H = r->hierarchy;
        const auto& h = r->stats.residual_history;
        out << r->label << ',' << r->problem.size() << ',' << r->problem.nx << ',' << r->problem.ny << ','
            << r->stats.iterations << ',' << (r->stats.converged ? 1 : 0) << ',' << H.num_levels() << ','
            << (H.truncated_at ? std::to_string(*H.truncated_at) : std::string()) << ','
            << num(H.grid_complexity) << ',' << num(H.storage_complexity) << ',' << num(H.cycle_complexity)
            << ',' << (h.empty() ? std::string() : num(h.back())) << ',' << num(H.timings.total) << ','
            << num(r->solve_seconds) << '\n';
    }
}

void write_history_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
    out << "label,n,iteration,residual\n";
    for (const RunRecord* r : sorted(runs))
        for (std::size_t k = 0; k < r->stats.residual_history.size(); ++k)
            out << r->label << ',' << r->problem.size() << ',' << k << ','
                << num(r->stats.residual_history[k]) << '\n';
}

void write_setup_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
    out << "label,n,cf_split,prolongator,polynomial,spgemm_R,spgemm_coarse,extract,drop,truncation,"
           "coarse_solver,total\n";
    for (const RunRecord* r : sorted(runs)) {
        const auto& t = r->hierarchy.timings;
        out << r->label << ',' << r->problem.size();
        for (double v : {t.cf_split, t.prolongator, t.polynomial, t.spgemm_R, t.spgemm_coarse, t.extract,
                         t.drop, t.truncation, t.coarse_solver, t.total})
            out << ',' << num(v);
        out << '\n';
    }
}

void write_cf_dump(std::ostream& out, const Hierarchy& H) {
    out << "level,index,mark,ratio\n";
    for (std::size_t l = 0; l < H.levels.size(); ++l) {
        const Level& L = H.levels[l];
        // Ratios of the final split, recomputed from the retained F blocks.
        Vector diag(static_cast<std::size_t>(L.A_ff.nrows), 0.0), off(diag.size(), 0.0);
        for (index_t i = 0; i < L.A_ff.nrows; ++i)
            for (index_t k = L.A_ff.row_offsets[i]; k < L.A_ff.row_offsets[i + 1]; ++k) {
                if (L.A_ff.col_indices[k] == i)
                    diag[i] += L.A_ff.values[k];
                else
                    off[i] += std::abs(L.A_ff.values[k]);
            }
        index_t f = 0;
        for (index_t i = 0; i < L.split.size(); ++i) {
            out << l << ',' << i << ',';
            if (L.split.labels[i] == Mark::fine) {
                out << "F," << num(diag[f] != 0.0 ? off[f] / std::abs(diag[f]) : INFINITY) << '\n';
                ++f;
            } else {
                out << "C,\n";
            }
        }
    }
}

void write_ddc_histogram(std::ostream& out, const Hierarchy& H) {
    out << "level,pass,bin,lower,upper,count\n";
    for (std::size_t l = 0; l < H.levels.size(); ++l) {
        const auto& passes = H.levels[l].ddc_passes;
        for (std::size_t p = 0; p < passes.size(); ++p) {
            const auto& ps = passes[p];
            const auto nb = ps.histogram.size();
            const double width = nb > 0 ? (ps.max_ratio - ps.min_ratio) / static_cast<double>(nb) : 0.0;
            for (std::size_t b = 0; b < nb; ++b) {
                if (ps.histogram[b] == 0) continue;
                out << l << ',' << p << ',' << b << ',' << num(ps.min_ratio + width * static_cast<double>(b))
                    << ',' << num(ps.min_ratio + width * static_cast<double>(b + 1)) << ',' << ps.histogram[b]
                    << '\n';
            }
        }
    }
}

namespace {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class F>
void write_file(const std::string& path, F body) {
    std::ofstream f(path);
    if (!f) throw OutputError("cannot open " + path + " for writing");
    body(f);
    f.flush();
    if (!f) throw OutputError("failed writing " + path);
}

void write_poly_file(const std::string& path, const std::vector<RunRecord>& runs) {
    json j;
    j["schema_version"] = json_schema_version;
    json rj = json::array();
    for (const RunRecord* r : sorted(runs)) {
        json one;
        one["label"] = r->label;
        one["n"] = r->problem.size();
        json levels = json::array();
        for (const auto& L : r->hierarchy.levels) levels.push_back(poly_json(L.f_smoother));
        one["smoothers"] = std::move(levels);
        one["coarse_solver"] = r->hierarchy.coarse_solver ? poly_json(*r->hierarchy.coarse_solver) : json(nullptr);
        rj.push_back(std::move(one));
    }
    j["runs"] = std::move(rj);
    write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

void export_levels(const std::string& dir, const RunRecord& r) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create directory " + dir + ": " + ec.message());
    const std::string prefix = dir + "/" + r.label + "_n" + std::to_string(r.problem.size()) + "_";
    const auto put = [&](const std::string& name, const CsrMatrix& A) {
        write_file(prefix + name + ".mtx", [&](std::ostream& o) { write_matrix_market(o, A); });
    };
    for (std::size_t l = 0; l < r.hierarchy.levels.size(); ++l) {
        const Level& L = r.hierarchy.levels[l];
        const std::string tag = "level" + std::to_string(l) + "_";
        put(tag + "R", L.R);
        put(tag + "P", L.P);
        put(tag + "A_ff", L.A_ff);
        put(tag + "A_fc", L.A_fc);
    }
    put("coarsest_A", r.hierarchy.coarsest_A);
}

std::string label_of(InverseType t) { return t == InverseType::neumann ? "nair" : "airg"; }

} // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    std::vector<AdvectionProblem> problems;
    try {
        cfg.setup.validate();
        cfg.solve.validate();
        if (cfg.solves < 1) throw ConfigError("solves must be >= 1");
        if (cfg.sweep.empty()) {
            problems.push_back(cfg.problem.resolve());
        } else {
            for (index_t n : cfg.sweep) {
                ProblemSpec p = cfg.problem;
                p.n = n;
                p.nx = 0;
                p.ny = 0;
                problems.push_back(p.resolve());
            }
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }

    std::vector<RunRecord> runs;
    try {
        if (!cfg.out.export_matrix.empty()) {
            const auto A = build_advection_2d(problems.front()).A;
            write_file(cfg.out.export_matrix, [&](std::ostream& o) { write_matrix_market(o, A); });
        }
        for (const auto& p : problems) {
            std::vector<SetupConfig> variants;
            if (cfg.compare_nair) {
                SetupConfig a = cfg.setup, b = cfg.setup;
                a.inverse_type = InverseType::arnoldi;
                b.inverse_type = InverseType::neumann;
                variants = {a, b};
            } else {
                variants = {cfg.setup};
            }
            for (const auto& sc : variants) {
                runs.push_back(run_one(p, sc, cfg.solve, cfg.solves, label_of(sc.inverse_type)));
                const auto& r = runs.back();
                if (!cfg.quiet) {
                    log << r.label << " n=" << p.size() << " iterations=" << r.stats.iterations
                        << " converged=" << (r.stats.converged ? "yes" : "no")
                        << " levels=" << r.hierarchy.num_levels() << " cycle_complexity=" << r.hierarchy.cycle_complexity
                        << " storage_complexity=" << r.hierarchy.storage_complexity
                        << " setup_s=" << r.hierarchy.timings.total << " solve_s=" << r.solve_seconds << '\n';
                    for (const auto& w : r.hierarchy.warnings) log << "warning: " << w << '\n';
                    if (!r.error.empty()) log << "diverged: " << r.error << '\n';
                }
            }
        }

        const auto& o = cfg.out;
        if (!o.json.empty())
            write_file(o.json, [&](std::ostream& f) { f << report_json(cfg, runs).dump(2) << '\n'; });
        if (!o.history_csv.empty()) write_file(o.history_csv, [&](std::ostream& f) { write_history_csv(f, runs); });
        if (!o.setup_csv.empty()) write_file(o.setup_csv, [&](std::ostream& f) { write_setup_csv(f, runs); });
        if (!o.records_csv.empty()) write_file(o.records_csv, [&](std::ostream& f) { write_records_csv(f, runs); });
        if (!o.cf_dump.empty())
            write_file(o.cf_dump, [&](std::ostream& f) { write_cf_dump(f, runs.front().hierarchy); });
        if (!o.ddc_histogram.empty())
            write_file(o.ddc_histogram, [&](std::ostream& f) { write_ddc_histogram(f, runs.front().hierarchy); });
        if (!o.poly_json.empty()) write_poly_file(o.poly_json, runs);
        if (!o.export_levels.empty())
            for (const auto& r : runs) export_levels(o.export_levels, r);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }

    const bool all = std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.stats.converged; });
    return all ? 0 : 2;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"AIRG reduction multigrid benchmark on upwind advection"};
    RunConfig cfg;
    register_options(app, cfg);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    return run(cfg, std::cout);
}

} // namespace airg::cli
