#ifndef AIRG_RANDOM_HPP
#define AIRG_RANDOM_HPP

#include <cstdint>
#include <random>

#include "airg/sparse_matrix.hpp"

namespace airg {

/// What a derived random stream is used for; distinct purposes on the same
/// level never share a stream.
enum class SeedPurpose : std::uint32_t {
    cf_split = 1,
    smoother_poly = 2,
    coarse_poly = 3,
    truncation_rhs = 4,
};

/// Deterministic child seed of (root, level, purpose) via std::seed_seq.
std::uint64_t derive_seed(std::uint64_t root, std::int64_t level, SeedPurpose purpose);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw, so the
/// sequence is identical across standard library implementations.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Components uniform in [-1, 1), normalised to unit 2-norm.
Vector random_unit_vector(index_t n, std::uint64_t seed);

} // namespace airg

#endif
