#pragma once

#include <cstdint>
#include <string>

#include "pdcl/grid.hpp"
#include "pdcl/operators.hpp"
#include "pdcl/problems.hpp"

namespace pdcl {

// Reference solutions built without the discrete-operators module: every
// stencil here is assembled again from the scheme's formulas.

struct OracleResult {
  Field trajectory;
  std::string method;
  double step_size_used = 0.0;
  std::string notes;
};

/// Sequential implicit solve of the same scheme PDHG targets, one sparse LU
/// per distinct step matrix. Linear schemes only.
OracleResult direct_implicit_solve(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid);

/// du/dt of the DG P1 scheme for one cell, from the weak form evaluated with
/// two-point Gauss quadrature, the quarter-point mass matrix and the upwind
/// flux f(u^-). Exact for linear and quadratic fluxes.
Vec2 dg_quadrature_rhs(const FluxSpec& flux, double hx, const Vec2& u_left, const Vec2& u_j);

/// Largest stable explicit step: h_x^2 / (2 max gamma) for FD heat and
/// h_x / (3 max |f'(u0)|) for DG with SSP-RK3.
double explicit_step_bound(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid);

/// Fine-step explicit trajectory restricted to the grid's time levels:
/// forward Euler for FD heat, SSP-RK3 for DG. dt_fine is reduced so that it
/// divides h_t.
OracleResult explicit_reference(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
                                double dt_fine);

struct AdjointCheck {
  /// Linear schemes: max relative defect of <A u, phi> = <u, A^T phi> + boundary.
  double max_defect = 0.0;
  /// Quadratic schemes: smallest observed order of the Taylor remainder
  /// L(u + e d) - L(u) - e <A^T phi, d> between e = 1e-3 and 5e-4. Zero for
  /// linear schemes.
  double min_order = 0.0;
};

/// Ten random (u, phi) pairs drawn from a generator seeded with `seed`.
AdjointCheck adjoint_check(const SchemeConfig& scheme, const SpaceTimeGrid& grid, std::uint64_t seed);

}  // namespace pdcl
