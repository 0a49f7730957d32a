#include "airg/strength_cf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "airg/random.hpp"

namespace airg {

StrengthGraph strength_graph(const CsrMatrix& A, double theta) {
    if (!A.is_square()) throw DimensionError("strength_graph: matrix must be square");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("strong threshold must lie in [0, 1], got " +
                                    std::to_string(theta));

    CsrMatrix S(A.nrows, A.ncols);
    for (index_t i = 0; i < A.nrows; ++i) {
        const auto cols = A.row_cols(i);
        const auto vals = A.row_vals(i);
        double max_off = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] != i) max_off = std::max(max_off, std::abs(vals[k]));
        if (max_off > 0.0) {
            const double cut = theta * max_off;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] == i || vals[k] == 0.0 || std::abs(vals[k]) < cut) continue;
                S.col_indices.push_back(cols[k]);
                S.values.push_back(1.0);
            }
        }
        S.row_offsets[i + 1] = static_cast<index_t>(S.col_indices.size());
    }
    CsrMatrix closure = add(S, transpose(S));
    std::fill(closure.values.begin(), closure.values.end(), 1.0);
    return {std::move(S), std::move(closure)};
}

CFSplit CFSplit::from_labels(std::vector<Mark> labels) {
    const auto n = static_cast<index_t>(labels.size());
    std::vector<index_t> f, c;
    for (index_t i = 0; i < n; ++i) (labels[i] == Mark::fine ? f : c).push_back(i);
    CFSplit s;
    s.labels = std::move(labels);
    s.f_set = IndexSet(std::move(f), n);
    s.c_set = IndexSet(std::move(c), n);
    return s;
}

PmisrResult pmisr(const StrengthGraph& G, std::uint64_t seed, int max_luby_loops) {
    const CsrMatrix& Gs = G.symmetric_closure;
    const index_t n = Gs.nrows;
    enum class State : std::uint8_t { undecided, fine, coarse };
    std::vector<State> state(static_cast<std::size_t>(n), State::undecided);

    std::mt19937_64 gen(seed);
    std::vector<double> weight(static_cast<std::size_t>(n));
    for (auto& w : weight) w = uniform01(gen);

    auto beats = [&](index_t j, index_t i) {
        return weight[j] > weight[i] || (weight[j] == weight[i] && j < i);
    };

    std::vector<index_t> undecided;
    for (index_t i = 0; i < n; ++i) {
        if (Gs.row_offsets[i + 1] == Gs.row_offsets[i]) state[i] = State::fine;
        else undecided.push_back(i);
    }

    int rounds = 0;
    std::vector<index_t> selected;
    while (!undecided.empty()) {
        if (max_luby_loops > 0 && rounds >= max_luby_loops) {
            for (index_t i : undecided) state[i] = State::coarse;
            break;
        }
        // Selection reads only the previous round's state.
        selected.clear();
        for (index_t i : undecided) {
            bool local_max = true;
            for (index_t j : Gs.row_cols(i)) {
                if (state[j] == State::undecided && beats(j, i)) {
                    local_max = false;
                    break;
                }
            }
            if (local_max) selected.push_back(i);
        }
        for (index_t i : selected) state[i] = State::fine;
        for (index_t i : selected)
            for (index_t j : Gs.row_cols(i))
                if (state[j] == State::undecided) state[j] = State::coarse;
        std::erase_if(undecided, [&](index_t i) { return state[i] != State::undecided; });
        ++rounds;
    }

    std::vector<Mark> labels(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) labels[i] = state[i] == State::fine ? Mark::fine : Mark::coarse;
    return {CFSplit::from_labels(std::move(labels)), rounds};
}

std::vector<double> dominance_ratios(const CsrMatrix& A, const CFSplit& split) {
    if (!A.is_square() || A.nrows != split.size())
        throw DimensionError("dominance_ratios: splitting does not match matrix");
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(split.n_fine()));
    for (index_t i : split.f_set.indices()) {
        const auto cols = A.row_cols(i);
        const auto vals = A.row_vals(i);
        double diag = 0.0, off = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == i) diag = vals[k];
            else if (split.labels[cols[k]] == Mark::fine) off += std::abs(vals[k]);
        }
        if (diag == 0.0)
            throw std::domain_error("zero diagonal in F row " + std::to_string(i) +
                                    ": splitting is invalid for reduction");
        ratios.push_back(off / std::abs(diag));
    }
    return ratios;
}

CFSplit ddc_pass(const CsrMatrix& A, const CFSplit& split, double fraction, index_t nbins,
                 DdcPassStats* stats) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("ddc fraction must lie in (0, 1)");
    if (nbins < 1) throw std::invalid_argument("ddc needs at least one bin");

    const auto ratios = dominance_ratios(A, split);
    const auto n_fine = static_cast<index_t>(ratios.size());
    DdcPassStats local;
    local.n_fine_before = n_fine;
    if (n_fine == 0) {
        if (stats) *stats = local;
        return split;
    }

    const auto [lo_it, hi_it] = std::minmax_element(ratios.begin(), ratios.end());
    const double lo = *lo_it, hi = *hi_it;
    const double target = fraction * static_cast<double>(n_fine);
    local.min_ratio = lo;
    local.max_ratio = hi;

    std::vector<index_t> bin_of(static_cast<std::size_t>(n_fine), 0);
    index_t cut_bin = 0;
    if (hi == lo) {
        // Single populated bin: all or nothing, whichever is strictly closer.
        local.histogram = {n_fine};
        const double all_gap = std::abs(static_cast<double>(n_fine) - target);
        cut_bin = all_gap < target ? 0 : 1;
        local.cut = cut_bin == 0 ? lo : hi;
    } else {
        const double width = (hi - lo) / static_cast<double>(nbins);
        local.histogram.assign(static_cast<std::size_t>(nbins), 0);
        for (index_t k = 0; k < n_fine; ++k) {
            auto b = static_cast<index_t>((ratios[k] - lo) / width);
            b = std::clamp<index_t>(b, 0, nbins - 1);
            bin_of[k] = b;
            ++local.histogram[b];
        }
        // above = number of points in bins >= b; scan boundaries from the top
        // so that ties keep the higher boundary.
        index_t above = 0;
        cut_bin = nbins;
        double best_gap = target;
        for (index_t b = nbins - 1; b >= 0; --b) {
            above += local.histogram[b];
            const double gap = std::abs(static_cast<double>(above) - target);
            if (gap < best_gap) {
                best_gap = gap;
                cut_bin = b;
            }
        }
        local.cut = lo + width * static_cast<double>(cut_bin);
    }

    std::vector<Mark> labels = split.labels;
    for (index_t k = 0; k < n_fine; ++k) {
        if (bin_of[k] >= cut_bin) {
            labels[split.f_set[k]] = Mark::coarse;
            ++local.n_converted;
        }
    }
    if (stats) *stats = std::move(local);
    return CFSplit::from_labels(std::move(labels));
}

CfSplitResult cf_split(const CsrMatrix& A, const CfOptions& opts) {
    const auto graph = strength_graph(A, opts.strong_threshold);
    auto [split, rounds] = pmisr(graph, opts.seed, opts.max_luby_loops);
    CfSplitResult result;
    result.luby_rounds = rounds;
    for (int it = 0; it < opts.ddc_its; ++it) {
        DdcPassStats stats;
        split = ddc_pass(A, split, opts.ddc_fraction, opts.ddc_bins, &stats);
        result.passes.push_back(std::move(stats));
    }
    result.split = std::move(split);
    return result;
}

} // namespace airg
