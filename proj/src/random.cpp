#include "airg/random.hpp"

#include <array>

namespace airg {

std::uint64_t derive_seed(std::uint64_t root, std::int64_t level, SeedPurpose purpose) {
    const auto lvl = static_cast<std::uint64_t>(level);
    std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                      static_cast<std::uint32_t>(lvl), static_cast<std::uint32_t>(lvl >> 32),
                      static_cast<std::uint32_t>(purpose)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Vector random_unit_vector(index_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Vector v(static_cast<std::size_t>(n));
    for (auto& x : v) x = 2.0 * uniform01(gen) - 1.0;
    const double nrm = norm2(v);
    if (nrm > 0.0)
        for (auto& x : v) x /= nrm;
    return v;
}

} // namespace airg
