#ifndef AIRG_STRENGTH_CF_HPP
#define AIRG_STRENGTH_CF_HPP

#include <cstdint>
#include <vector>

#include "airg/sparse_matrix.hpp"

namespace airg {

/// Strong-connection adjacency (unit values, no diagonal) and the pattern of
/// strong + strong^T that the independent-set search runs on.
struct StrengthGraph {
    CsrMatrix strong;
    CsrMatrix symmetric_closure;
};

/// Edge (i, j), j != i, when a_ij != 0 and |a_ij| >= theta * max_{k != i} |a_ik|.
StrengthGraph strength_graph(const CsrMatrix& A, double theta);

enum class Mark : std::uint8_t { fine = 0, coarse = 1 };

/// Coarse/fine partition of 0..n-1.
struct CFSplit {
    std::vector<Mark> labels;
    IndexSet f_set;
    IndexSet c_set;

    static CFSplit from_labels(std::vector<Mark> labels);

    [[nodiscard]] index_t size() const { return static_cast<index_t>(labels.size()); }
    [[nodiscard]] index_t n_fine() const { return f_set.size(); }
    [[nodiscard]] index_t n_coarse() const { return c_set.size(); }
};

/// Luby-style maximal independent set on the symmetric closure; the set
/// becomes the F points. Each node's weight is a uniform [0,1) draw from
/// mt19937_64(seed) in node order; a node joins F when its (weight, -index)
/// exceeds that of every undecided neighbour. max_luby_loops <= 0 means
/// unlimited; nodes still undecided at the cap become C.
struct PmisrResult {
    CFSplit split;
    int rounds = 0;
};
PmisrResult pmisr(const StrengthGraph& G, std::uint64_t seed, int max_luby_loops = 0);

/// rho_i = sum_{j in F, j != i} |a_ij| / |a_ii| for every F point, in f_set
/// order. Throws std::domain_error on a zero diagonal in an F row.
std::vector<double> dominance_ratios(const CsrMatrix& A, const CFSplit& split);

struct DdcPassStats {
    index_t n_fine_before = 0;
    index_t n_converted = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double cut = 0.0;
    std::vector<index_t> histogram;
};

/// One diagonal-dominance cleanup pass: bins the F-point ratios into nbins
/// equal-width bins over [min, max] and converts to C every F point at or
/// above the bin boundary whose count above it is closest to fraction*|F|
/// (ties go to the higher boundary, i.e. fewer conversions).
CFSplit ddc_pass(const CsrMatrix& A, const CFSplit& split, double fraction, index_t nbins,
                 DdcPassStats* stats = nullptr);

struct CfOptions {
    double strong_threshold = 0.99;
    double ddc_fraction = 0.01;
    int ddc_its = 2;
    index_t ddc_bins = 1000;
    int max_luby_loops = 0;
    std::uint64_t seed = 0;
};

struct CfSplitResult {
    CFSplit split;
    int luby_rounds = 0;
    std::vector<DdcPassStats> passes;
};

/// PMISR followed by ddc_its cleanup passes.
CfSplitResult cf_split(const CsrMatrix& A, const CfOptions& opts);

} // namespace airg

#endif
