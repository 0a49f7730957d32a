#ifndef AIRG_CLI_HPP
#define AIRG_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "airg/advection.hpp"
#include "airg/cycle.hpp"
#include "airg/hierarchy.hpp"

namespace CLI {
class App;
}

namespace airg::cli {

inline constexpr int json_schema_version = 1;

struct ProblemSpec {
    int dim = 2;
    index_t n = 64;          ///< cells per dimension unless nx/ny are given
    index_t nx = 0;          ///< 0: use n
    index_t ny = 0;          ///< 0: use n (2D only)
    double vx = 1.0;
    double vy = 1.0;
    std::optional<double> angle; ///< overrides vx, vy when set

    /// Concrete (nx, ny, vx, vy); ny == 0 for 1D.
    [[nodiscard]] AdvectionProblem resolve() const;
};

struct OutputPaths {
    std::string json;            ///< full results
    std::string history_csv;     ///< residual history
    std::string setup_csv;       ///< setup-phase timing breakdown
    std::string records_csv;     ///< one summary row per run, sorted by n
    std::string export_matrix;   ///< top-grid matrix in Matrix Market format
    std::string export_levels;   ///< directory for per-level R, P, A_ff, A_fc
    std::string cf_dump;         ///< per-level CF labels and F-point dominance ratios
    std::string ddc_histogram;   ///< per-level, per-pass DDC ratio histograms
    std::string poly_json;       ///< polynomial coefficients and roots
};

struct RunConfig {
    ProblemSpec problem;
    std::vector<index_t> sweep; ///< when non-empty, run once per n in this list
    SetupConfig setup;
    SolveConfig solve;
    int solves = 2;             ///< timings come from the last solve
    bool compare_nair = false;  ///< paired run with inverse_type neumann
    OutputPaths out;
    bool quiet = false;
};

/// One row of the flag table documented in the README.
struct FlagInfo {
    std::string flag;       ///< long option, e.g. "--strong-threshold"
    std::string config_key; ///< key in config_json, e.g. "setup.strong_threshold"
    std::string description;
};

/// Every flag that maps onto a SetupConfig or SolveConfig field.
const std::vector<FlagInfo>& config_flag_table();

/// Registers all options on `app`, writing into `cfg`.
void register_options(CLI::App& app, RunConfig& cfg);

nlohmann::ordered_json config_json(const SetupConfig& c);
nlohmann::ordered_json config_json(const SolveConfig& c);
nlohmann::ordered_json hierarchy_json(const Hierarchy& H);
nlohmann::ordered_json solve_json(const SolveStats& s);
nlohmann::ordered_json poly_json(const PolySolver& p);
nlohmann::ordered_json timings_json(const SetupTimings& t);

/// Result of one setup + solve on one problem.
struct RunRecord {
    std::string label; ///< "airg" or "nair"
    AdvectionProblem problem;
    Hierarchy hierarchy;
    SolveStats stats;
    std::string error; ///< divergence message, empty otherwise
    double solve_seconds = 0.0;
};

RunRecord run_one(const AdvectionProblem& problem, const SetupConfig& setup, const SolveConfig& solve,
                  int solves, const std::string& label);

/// Deterministic part of the report; wall times live under "timings" only.
nlohmann::ordered_json report_json(const RunConfig& cfg, const std::vector<RunRecord>& runs);

/// One row per record sorted by (n, label) with a header line.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_history_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_setup_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_cf_dump(std::ostream& out, const Hierarchy& H);
void write_ddc_histogram(std::ostream& out, const Hierarchy& H);

/// Exit codes: 0 all runs converged, 2 some run did not converge, 1 errors.
int run(const RunConfig& cfg, std::ostream& log);

/// Parses argv and runs; the whole program.
int main_entry(int argc, char** argv);

} // namespace airg::cli

#endif
