#include "pdcl/operators.hpp"

#include <algorithm>
#include <cmath>

namespace pdcl {

std::string to_string(TimeScheme s) { return s == TimeScheme::BackwardEuler ? "be" : "bdf2"; }

std::string to_string(SpaceScheme s) {
  switch (s) {
    case SpaceScheme::FDHeat: return "fd-heat";
    case SpaceScheme::DGLinear: return "dg-linear";
    case SpaceScheme::DGQuadratic: return "dg-quadratic";
  }
  return "?";
}

TimeScheme parse_time_scheme(const std::string& s) {
  if (s == "be" || s == "backward-euler") return TimeScheme::BackwardEuler;
  if (s == "bdf2") return TimeScheme::BDF2;
  throw ArgumentError("unknown time scheme '" + s + "'");
}

SpaceScheme parse_space_scheme(const std::string& s) {
  if (s == "fd-heat") return SpaceScheme::FDHeat;
  if (s == "dg-linear") return SpaceScheme::DGLinear;
  if (s == "dg-quadratic") return SpaceScheme::DGQuadratic;
  throw ArgumentError("unknown space scheme '" + s + "'");
}

double FluxSpec::f(double u) const {
  return kind == Kind::Linear ? alpha * u : alpha * u * u + beta * u;
}

double FluxSpec::df(double u) const {
  return kind == Kind::Linear ? alpha : 2.0 * alpha * u + beta;
}

namespace {

Mat2 scaled(double s, const Mat2& m) {
  return {{{s * m[0][0], s * m[0][1]}, {s * m[1][0], s * m[1][1]}}};
}

Vec2 mul(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Vec2 mul_t(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[1][0] * v[1], m[0][1] * v[0] + m[1][1] * v[1]};
}

double form(const Mat2& m, const Vec2& v) {
  return v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1]);
}

/// Gradient of v^T m v.
Vec2 form_grad(const Mat2& m, const Vec2& v) {
  return {(m[0][0] + m[0][0]) * v[0] + (m[0][1] + m[1][0]) * v[1],
          (m[1][0] + m[0][1]) * v[0] + (m[1][1] + m[1][1]) * v[1]};
}

Vec2 cell(std::span<const double> v, int j, int nx) {
  int k = wrap(j, nx);
  return {v[2 * k], v[2 * k + 1]};
}

}  // namespace

DGMatrices dg_matrices(const FluxSpec& flux, double hx) {
  DGMatrices m;
  const Mat2 a1{{{-7.0, -3.0}, {11.0, -9.0}}};
  const Mat2 a2{{{-5.0, 15.0}, {1.0, -3.0}}};
  double lin = flux.kind == FluxSpec::Kind::Linear ? flux.alpha + flux.shift : flux.beta + flux.shift;
  m.A1 = scaled(lin / (4.0 * hx), a1);
  m.A2 = scaled(lin / (4.0 * hx), a2);
  if (flux.kind == FluxSpec::Kind::Quadratic) {
    const double a = flux.alpha / (8.0 * hx);
    const Mat2 p{{{1.0, -3.0}, {-3.0, 9.0}}};
    m.C[0] = scaled(5.0 * a, p);
    m.C[1] = scaled(-a, p);
    m.C[2] = scaled(-a, Mat2{{{13.0, 1.0}, {1.0, 5.0}}});
    m.C[3] = scaled(a, Mat2{{{9.0, 13.0}, {13.0, -31.0}}});
    m.C[6] = m.A2;
    m.C[7] = m.A1;
  }
  return m;
}

Slice lap_fd(std::span<const double> v, std::span<const double> gamma_half, double hx) {
  const int n = static_cast<int>(v.size());
  Slice out(v.size());
  const double s = 1.0 / (hx * hx);
  for (int j = 0; j < n; ++j) {
    const int jp = wrap(j + 1, n), jm = wrap(j - 1, n);
    out[j] = s * (gamma_half[j] * (v[jp] - v[j]) - gamma_half[jm] * (v[j] - v[jm]));
  }
  return out;
}

Vec2 dg_linear_rhs(const DGMatrices& m, const Vec2& u_left, const Vec2& u_j) {
  Vec2 a = mul(m.A1, u_j), b = mul(m.A2, u_left);
  return {a[0] + b[0], a[1] + b[1]};
}

Vec2 dg_quadratic_rhs(const DGMatrices& m, const Vec2& u_left, const Vec2& u_j, const Vec2& u_right) {
  const auto& C = m.C;
  Vec2 r{form(C[0], u_left) + form(C[2], u_j) + form(C[4], u_right),
         form(C[1], u_left) + form(C[3], u_j) + form(C[5], u_right)};
  Vec2 l7 = mul(C[6], u_left), l8 = mul(C[7], u_j), l9 = mul(C[8], u_right);
  return {r[0] + l7[0] + l8[0] + l9[0], r[1] + l7[1] + l8[1] + l9[1]};
}

double monotonicity_shift(const FluxSpec& flux, std::span<const double> u0) {
  double lo = 0.0;
  for (double u : u0) lo = std::min(lo, flux.df(u));
  return lo < 0.0 ? -1.1 * lo : 0.0;
}

TimeStencil::TimeStencil(TimeScheme scheme, int nt, double ht, bool has_history)
    : nt_(nt), band_(scheme == TimeScheme::BackwardEuler ? 1 : 2), history_(has_history) {
  if (scheme == TimeScheme::BDF2 && nt < 2 && !has_history)
    throw ArgumentError("BDF2 needs N_t >= 2 or a history slice");
  if (scheme == TimeScheme::BackwardEuler && has_history)
    throw ArgumentError("backward Euler takes no history slice");
  c_.resize(nt);
  for (int r = 0; r < nt; ++r) {
    if (scheme == TimeScheme::BDF2 && (r > 0 || has_history))
      c_[r] = {1.5 / ht, -2.0 / ht, 0.5 / ht};
    else
      c_[r] = {1.0 / ht, -1.0 / ht, 0.0};
  }
}

double TimeStencil::coef(int r, int l) const {
  if (r < 0 || r >= nt_) return 0.0;
  int k = r + 1 - l;
  if (k < 0 || k > 2) return 0.0;
  return c_[r][k];
}

SpaceTimeOperator::SpaceTimeOperator(SchemeConfig scheme, SpaceTimeGrid grid, std::optional<Slice> history)
    : scheme_(std::move(scheme)),
      grid_(grid),
      stencil_(scheme_.time, grid.nt, grid.ht(), history.has_value()),
      history_(std::move(history)) {
  const bool linear_flux = scheme_.flux.kind == FluxSpec::Kind::Linear;
  switch (scheme_.space) {
    case SpaceScheme::FDHeat: {
      if (!scheme_.gamma) throw ArgumentError("FD heat scheme needs a viscosity function");
      gamma_half_.resize(grid_.nx);
      for (int j = 0; j < grid_.nx; ++j) {
        gamma_half_[j] = scheme_.gamma(grid_.half_point(j));
        if (!(gamma_half_[j] > 0.0)) throw ArgumentError("FD heat scheme needs gamma > 0 at every half point");
      }
      break;
    }
    case SpaceScheme::DGLinear:
      if (!linear_flux) throw ArgumentError("dg-linear needs a linear flux");
      if (scheme_.flux.alpha + scheme_.flux.shift < 0.0)
        throw ArgumentError("dg-linear upwinding needs alpha + s >= 0");
      dg_ = dg_matrices(scheme_.flux, grid_.hx());
      break;
    case SpaceScheme::DGQuadratic:
      if (linear_flux) throw ArgumentError("dg-quadratic needs a quadratic flux");
      dg_ = dg_matrices(scheme_.flux, grid_.hx());
      break;
  }
  if (history_ && history_->size() != slice_size())
    throw ArgumentError("history slice has the wrong size");
}

std::size_t SpaceTimeOperator::slice_size() const {
  return static_cast<std::size_t>(grid_.nx) * dofs_per_cell(layout());
}

Field SpaceTimeOperator::make_primal() const { return Field(layout(), grid_.nx, grid_.nt + 1, 0); }
Field SpaceTimeOperator::make_dual() const { return Field(layout(), grid_.nx, grid_.nt + 1, 0); }
Field SpaceTimeOperator::make_residual() const { return Field(layout(), grid_.nx, grid_.nt, 0); }
Field SpaceTimeOperator::make_dual_residual() const { return Field(layout(), grid_.nx, grid_.nt, 1); }

void SpaceTimeOperator::spatial(std::span<const double> v, std::span<double> out) const {
  const int nx = grid_.nx;
  switch (scheme_.space) {
    case SpaceScheme::FDHeat: {
      const double s = 1.0 / (grid_.hx() * grid_.hx());
      const auto& g = gamma_half_;
      for (int j = 0; j < nx; ++j) {
        const int jp = j + 1 == nx ? 0 : j + 1, jm = j == 0 ? nx - 1 : j - 1;
        out[j] = -s * (g[j] * (v[jp] - v[j]) - g[jm] * (v[j] - v[jm]));
      }
      break;
    }
    case SpaceScheme::DGLinear:
      for (int j = 0; j < nx; ++j) {
        Vec2 r = dg_linear_rhs(dg_, cell(v, j - 1, nx), cell(v, j, nx));
        out[2 * j] = -r[0];
        out[2 * j + 1] = -r[1];
      }
      break;
    case SpaceScheme::DGQuadratic:
      for (int j = 0; j < nx; ++j) {
        Vec2 r = dg_quadratic_rhs(dg_, cell(v, j - 1, nx), cell(v, j, nx), cell(v, j + 1, nx));
        out[2 * j] = -r[0];
        out[2 * j + 1] = -r[1];
      }
      break;
  }
}

void SpaceTimeOperator::spatial_jt(std::span<const double> u, std::span<const double> phi,
                                   std::span<double> out) const {
  const int nx = grid_.nx;
  switch (scheme_.space) {
    case SpaceScheme::FDHeat:
      // -Lap is symmetric.
      spatial(phi, out);
      break;
    case SpaceScheme::DGLinear:
      for (int k = 0; k < nx; ++k) {
        Vec2 a = mul_t(dg_.A1, cell(phi, k, nx)), b = mul_t(dg_.A2, cell(phi, k + 1, nx));
        out[2 * k] = -(a[0] + b[0]);
        out[2 * k + 1] = -(a[1] + b[1]);
      }
      break;
    case SpaceScheme::DGQuadratic: {
      const auto& C = dg_.C;
      for (int k = 0; k < nx; ++k) {
        const Vec2 uk = cell(u, k, nx);
        const Vec2 pr = cell(phi, k + 1, nx), pc = cell(phi, k, nx), pl = cell(phi, k - 1, nx);
        Vec2 acc{0.0, 0.0};
        auto add = [&acc](const Vec2& v, double s) {
          acc[0] += s * v[0];
          acc[1] += s * v[1];
        };
        // u_k enters row k+1 as the left cell, row k as the centre, row k-1 as the right cell.
        add(form_grad(C[0], uk), pr[0]);
        add(form_grad(C[1], uk), pr[1]);
        add(mul_t(C[6], pr), 1.0);
        add(form_grad(C[2], uk), pc[0]);
        add(form_grad(C[3], uk), pc[1]);
        add(mul_t(C[7], pc), 1.0);
        add(form_grad(C[4], uk), pl[0]);
        add(form_grad(C[5], uk), pl[1]);
        add(mul_t(C[8], pl), 1.0);
        out[2 * k] = -acc[0];
        out[2 * k + 1] = -acc[1];
      }
      break;
    }
  }
}

void SpaceTimeOperator::apply_A(const Field& u, Field& out) const {
  const int nt = grid_.nt;
  if (u.layout() != layout() || u.nx() != grid_.nx || u.first_level() != 0 || u.last_level() < nt)
    throw ArgumentError("apply_A: primal field does not match the scheme");
  if (!(out.layout() == layout() && out.nx() == grid_.nx && out.first_level() == 0 && out.levels() == nt))
    out = make_residual();
  const std::size_t m = slice_size();
  for (int r = 0; r < nt; ++r) {
    auto o = out.slice(r);
    spatial(u.slice(r + 1), o);
    for (int k = 0; k < 3; ++k) {
      const int l = r + 1 - k;
      const double c = stencil_.coef(r, l);
      if (c == 0.0) continue;
      const double* src = l >= 0 ? u.slice(l).data() : history_->data();
      for (std::size_t i = 0; i < m; ++i) o[i] += c * src[i];
    }
  }
}

Field SpaceTimeOperator::apply_A(const Field& u) const {
  Field out = make_residual();
  apply_A(u, out);
  return out;
}

void SpaceTimeOperator::apply_AT(const Field& phi, const Field& u, Field& out) const {
  const int nt = grid_.nt;
  if (phi.layout() != layout() || phi.nx() != grid_.nx || phi.first_level() != 0 || phi.last_level() < nt)
    throw ArgumentError("apply_AT: dual field does not match the scheme");
  const bool need_u = scheme_.space == SpaceScheme::DGQuadratic;
  if (need_u && (u.layout() != layout() || u.nx() != grid_.nx || u.first_level() != 0 || u.last_level() < nt))
    throw ArgumentError("apply_AT: quadratic flux needs the primal field");
  if (!(out.layout() == layout() && out.nx() == grid_.nx && out.first_level() == 1 && out.levels() == nt))
    out = make_dual_residual();
  const std::size_t m = slice_size();
  for (int l = 1; l <= nt; ++l) {
    auto o = out.slice(l);
    spatial_jt(need_u ? u.slice(l) : std::span<const double>{}, phi.slice(l - 1), o);
    for (int r = l - 1; r <= std::min(l + 1, nt - 1); ++r) {
      const double c = stencil_.coef(r, l);
      if (c == 0.0) continue;
      auto p = phi.slice(r);
      for (std::size_t i = 0; i < m; ++i) o[i] += c * p[i];
    }
  }
  const double cT = stencil_.coef(nt - 1, nt);
  auto o = out.slice(nt);
  auto p = phi.slice(nt);
  for (std::size_t i = 0; i < m; ++i) o[i] -= cT * p[i];
}

Field SpaceTimeOperator::apply_AT(const Field& phi, const Field& u) const {
  Field out = make_dual_residual();
  apply_AT(phi, u, out);
  return out;
}

void SpaceTimeOperator::apply_AT_initial(const Field& phi, std::span<double> out) const {
  const std::size_t m = slice_size();
  std::fill(out.begin(), out.end(), 0.0);
  const double ht = grid_.ht();
  for (int r = 0; r < std::min(2, grid_.nt); ++r) {
    const double c = ht * stencil_.coef(r, 0);
    if (c == 0.0) continue;
    auto p = phi.slice(r);
    for (std::size_t i = 0; i < m; ++i) out[i] += c * p[i];
  }
}

double SpaceTimeOperator::boundary(const Field& u, const Field& phi) const {
  const int nt = grid_.nt;
  const double kappa = grid_.ht() * stencil_.coef(nt - 1, nt);
  Slice a0(slice_size());
  apply_AT_initial(phi, a0);
  return kappa * slice_inner_product(phi.slice(nt), u.slice(nt), grid_, layout()) +
         slice_inner_product(a0, u.slice(0), grid_, layout());
}

double SpaceTimeOperator::lagrangian(const Field& u, const Field& phi) const {
  Field r = apply_A(u);
  return inner_product(r, restrict_levels(phi, 0, grid_.nt - 1), grid_);
}

}  // namespace pdcl
