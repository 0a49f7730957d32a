#ifndef AIRG_ADVECTION_HPP
#define AIRG_ADVECTION_HPP

#include "airg/sparse_matrix.hpp"

namespace airg {

/// Constant-velocity upwind advection on a structured grid of nx*ny cells.
///
/// Velocities are restricted to the first quadrant, so the inflow boundary is
/// the west column and/or the south row. The operator is non-dimensionalised
/// by the mesh spacing: stencil values are independent of nx, ny, lx, ly,
/// which are kept as metadata only. ny == 0 selects the 1D problem.
struct AdvectionProblem {
    index_t nx = 1;
    index_t ny = 1;
    double vx = 1.0;
    double vy = 0.0;
    double lx = 1.0;
    double ly = 1.0;

    /// Unit velocity (cos a, sin a); a must lie in [0, pi/2].
    static AdvectionProblem from_angle(index_t nx, index_t ny, double angle);

    [[nodiscard]] index_t size() const { return ny == 0 ? nx : nx * ny; }
    void validate() const;
};

struct LinearSystem {
    CsrMatrix A;
    Vector rhs;
};

/// Unknowns ordered row-major with x fastest: idx = iy*nx + ix. Interior rows
/// hold [-vy (south), -vx (west), vx+vy (diagonal)]; inflow rows omit the
/// out-of-domain neighbour and keep the full diagonal. Zero inflow data gives
/// rhs = 0. The result is lower triangular.
LinearSystem build_advection_2d(const AdvectionProblem& p);

/// n x n lower bidiagonal matrix: diagonal vx, subdiagonal -vx.
CsrMatrix build_advection_1d(index_t n, double vx);

} // namespace airg

#endif
