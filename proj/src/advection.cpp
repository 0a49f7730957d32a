#include "airg/advection.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace airg {

AdvectionProblem AdvectionProblem::from_angle(index_t nx, index_t ny, double angle) {
    if (!(angle >= 0.0 && angle <= std::numbers::pi / 2))
        throw std::invalid_argument("advection angle must lie in [0, pi/2], got " +
                                    std::to_string(angle));
    AdvectionProblem p;
    p.nx = nx;
    p.ny = ny;
    p.vx = std::cos(angle);
    p.vy = std::sin(angle);
    // cos(pi/2) is 6e-17, not zero; snap so grid-aligned angles stay grid aligned.
    if (std::abs(p.vx) < 1e-15) p.vx = 0.0;
    if (std::abs(p.vy) < 1e-15) p.vy = 0.0;
    return p;
}

void AdvectionProblem::validate() const {
    if (!(vx >= 0.0 && vy >= 0.0) || !(vx + vy > 0.0) || !std::isfinite(vx + vy))
        throw std::invalid_argument("velocity must satisfy vx >= 0, vy >= 0, vx + vy > 0");
    if (nx < 1 || ny < 0) throw std::invalid_argument("grid needs nx >= 1 and ny >= 0");
    if (ny == 0 && vy != 0.0) throw std::invalid_argument("1D problem requires vy = 0");
}

LinearSystem build_advection_2d(const AdvectionProblem& p) {
    p.validate();
    const index_t ny = p.ny == 0 ? 1 : p.ny;
    const index_t n = p.nx * ny;
    const double diag = p.vx + p.vy;

    CsrMatrix A(n, n);
    A.col_indices.reserve(static_cast<std::size_t>(3 * n));
    A.values.reserve(static_cast<std::size_t>(3 * n));
    auto push = [&](index_t col, double v) {
        A.col_indices.push_back(col);
        A.values.push_back(v);
    };
    for (index_t iy = 0; iy < ny; ++iy) {
        for (index_t ix = 0; ix < p.nx; ++ix) {
            const index_t row = iy * p.nx + ix;
            if (iy > 0 && p.vy != 0.0) push(row - p.nx, -p.vy);
            if (ix > 0 && p.vx != 0.0) push(row - 1, -p.vx);
            push(row, diag);
            A.row_offsets[row + 1] = static_cast<index_t>(A.col_indices.size());
        }
    }
    return {std::move(A), Vector(static_cast<std::size_t>(n), 0.0)};
}

CsrMatrix build_advection_1d(index_t n, double vx) {
    if (n < 1) throw std::invalid_argument("1D advection needs n >= 1");
    if (!(vx > 0.0)) throw std::invalid_argument("1D advection needs vx > 0");
    AdvectionProblem p;
    p.nx = n;
    p.ny = 0;
    p.vx = vx;
    p.vy = 0.0;
    return build_advection_2d(p).A;
}

} // namespace airg
