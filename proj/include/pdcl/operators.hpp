#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdcl/grid.hpp"

namespace pdcl {

enum class TimeScheme { BackwardEuler, BDF2 };
enum class SpaceScheme { FDHeat, DGLinear, DGQuadratic };

std::string to_string(TimeScheme s);
std::string to_string(SpaceScheme s);
TimeScheme parse_time_scheme(const std::string& s);
SpaceScheme parse_space_scheme(const std::string& s);

/// f(u) = alpha*u (linear) or alpha*u^2 + beta*u (quadratic). The shift s is
/// added to the linear coefficient when the scheme is built, so upwinding
/// from the left stays valid.
struct FluxSpec {
  enum class Kind { Linear, Quadratic };
  Kind kind = Kind::Linear;
  double alpha = 0.0;
  double beta = 0.0;
  double shift = 0.0;

  static FluxSpec linear(double alpha) { return {Kind::Linear, alpha, 0.0, 0.0}; }
  static FluxSpec quadratic(double alpha, double beta) { return {Kind::Quadratic, alpha, beta, 0.0}; }

  double f(double u) const;
  double df(double u) const;
};

struct SchemeConfig {
  TimeScheme time = TimeScheme::BackwardEuler;
  SpaceScheme space = SpaceScheme::FDHeat;
  FluxSpec flux;
  /// Viscosity, sampled at the FD half points. Unused by DG schemes.
  std::function<double(double)> gamma;

  Layout layout() const { return space == SpaceScheme::FDHeat ? Layout::FD : Layout::DG2; }
  bool linear() const { return space != SpaceScheme::DGQuadratic; }
};

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

/// DG P1 coefficient matrices, already scaled by 1/h_x and the flux
/// coefficients. C[0] is C1, ..., C[8] is C9.
struct DGMatrices {
  Mat2 A1{}, A2{};
  std::array<Mat2, 9> C{};
};

DGMatrices dg_matrices(const FluxSpec& flux, double hx);

/// Lap(v)_j = (g_{j+1/2}(v_{j+1} - v_j) - g_{j-1/2}(v_j - v_{j-1})) / h_x^2,
/// with gamma_half[j] = g_{j+1/2}.
Slice lap_fd(std::span<const double> v, std::span<const double> gamma_half, double hx);

/// du_j/dt = A1 u_j + A2 u_{j-1}.
Vec2 dg_linear_rhs(const DGMatrices& m, const Vec2& u_left, const Vec2& u_j);

/// du_j/dt for the quadratic flux. u_right enters only through C5, C6, C9,
/// which vanish, but is kept so the stencil reads like the scheme.
Vec2 dg_quadratic_rhs(const DGMatrices& m, const Vec2& u_left, const Vec2& u_j, const Vec2& u_right);

/// Smallest s >= 0, with a 10% margin, such that f'(u0) + s >= 0 on the samples.
double monotonicity_shift(const FluxSpec& flux, std::span<const double> u0);

/// Rows of the time difference. Row r (r = 0..N_t-1) is paired with the dual
/// slice phi^r and holds coefficients on levels r+1, r, r-1. Level -1 refers
/// to an optional fixed history slice.
class TimeStencil {
 public:
  TimeStencil(TimeScheme scheme, int nt, double ht, bool has_history = false);

  int nt() const { return nt_; }
  /// Coefficient of u^l in row r (zero outside the stencil).
  double coef(int r, int l) const;
  /// Largest level offset below the diagonal (1 for BE, 2 for BDF2).
  int bandwidth() const { return band_; }
  bool has_history() const { return history_; }

 private:
  int nt_;
  int band_;
  bool history_;
  // c_[r][k] is the coefficient on level r + 1 - k.
  std::vector<std::array<double, 3>> c_;
};

/// The space-time residual operator A of the implicit scheme and its adjoint.
class SpaceTimeOperator {
 public:
  SpaceTimeOperator(SchemeConfig scheme, SpaceTimeGrid grid, std::optional<Slice> history = {});

  const SchemeConfig& scheme() const { return scheme_; }
  const SpaceTimeGrid& grid() const { return grid_; }
  const TimeStencil& stencil() const { return stencil_; }
  const DGMatrices& dg() const { return dg_; }
  const Slice& gamma_half() const { return gamma_half_; }
  Layout layout() const { return scheme_.layout(); }
  std::size_t slice_size() const;

  /// Levels 0..N_t.
  Field make_primal() const;
  /// Levels 0..N_t, terminal slice included.
  Field make_dual() const;
  /// Levels 0..N_t-1.
  Field make_residual() const;
  /// Levels 1..N_t.
  Field make_dual_residual() const;

  /// Spatial operator S in residual form: u_t + S(u) = 0.
  void spatial(std::span<const double> v, std::span<double> out) const;
  /// out = J_S(u)^T phi.
  void spatial_jt(std::span<const double> u, std::span<const double> phi,
                  std::span<double> out) const;

  /// R^r = sum_l T[r][l] u^l + S(u^{r+1}), r = 0..N_t-1.
  void apply_A(const Field& u, Field& out) const;
  Field apply_A(const Field& u) const;

  /// D^l = sum_r T[r][l] phi^r + J_S(u^l)^T phi^{l-1} - T[N_t-1][N_t] phi^{N_t} [l = N_t],
  /// l = 1..N_t. With this sign <A u, phi> = <u, D> + boundary(u, phi).
  void apply_AT(const Field& phi, const Field& u, Field& out) const;
  Field apply_AT(const Field& phi, const Field& u) const;

  /// h_t * sum_r T[r][0] phi^r, the adjoint acting on the initial slice.
  void apply_AT_initial(const Field& phi, std::span<double> out) const;

  /// Boundary row of the summation by parts:
  /// w * (kappa_T * sum phi^{N_t} u^{N_t} + sum (A_0^T phi) u^0).
  /// For backward Euler this is sum_j h_x (phi^{N_t} u^{N_t} - phi^0 u^0).
  double boundary(const Field& u, const Field& phi) const;

  /// The discrete Lagrangian <A(u), phi>.
  double lagrangian(const Field& u, const Field& phi) const;

 private:
  SchemeConfig scheme_;
  SpaceTimeGrid grid_;
  TimeStencil stencil_;
  std::optional<Slice> history_;
  DGMatrices dg_;
  Slice gamma_half_;
};

}  // namespace pdcl
