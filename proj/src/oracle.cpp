#include "pdcl/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

namespace pdcl {

namespace {

using Sp = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

/// Matrix of the spatial term L in u_t + L u = 0.
Sp spatial_matrix(const SchemeConfig& scheme, const SpaceTimeGrid& grid) {
  const int n = grid.nx;
  const double h = grid.hx();
  std::vector<Trip> t;
  if (scheme.space == SpaceScheme::FDHeat) {
    for (int j = 0; j < n; ++j) {
      const double gr = scheme.gamma(grid.x_min + (j + 0.5) * h);
      const double gl = scheme.gamma(grid.x_min + (j - 0.5) * h);
      t.emplace_back(j, j, (gr + gl) / (h * h));
      t.emplace_back(j, (j + 1) % n, -gr / (h * h));
      t.emplace_back(j, (j + n - 1) % n, -gl / (h * h));
    }
  } else if (scheme.space == SpaceScheme::DGLinear) {
    const double a = (scheme.flux.alpha + scheme.flux.shift) / h;
    const double own[2][2] = {{-1.75, -0.75}, {2.75, -2.25}};
    const double left[2][2] = {{-1.25, 3.75}, {0.25, -0.75}};
    for (int j = 0; j < n; ++j) {
      const int jm = (j + n - 1) % n;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          t.emplace_back(2 * j + r, 2 * j + c, -a * own[r][c]);
          t.emplace_back(2 * j + r, 2 * jm + c, -a * left[r][c]);
        }
    }
  } else {
    throw ArgumentError("direct_implicit_solve: linear schemes only");
  }
  const int m = scheme.space == SpaceScheme::FDHeat ? n : 2 * n;
  Sp L(m, m);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

std::vector<double> dg_rhs_all(const FluxSpec& flux, double h, const std::vector<double>& u) {
  const int n = static_cast<int>(u.size() / 2);
  std::vector<double> out(u.size());
  for (int j = 0; j < n; ++j) {
    const int jm = (j + n - 1) % n;
    Vec2 r = dg_quadrature_rhs(flux, h, {u[2 * jm], u[2 * jm + 1]}, {u[2 * j], u[2 * j + 1]});
    out[2 * j] = r[0];
    out[2 * j + 1] = r[1];
  }
  return out;
}

}  // namespace

OracleResult direct_implicit_solve(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid) {
  Sp L = spatial_matrix(scheme, grid);
  const Eigen::Index m = L.rows();
  if (m > 10000) throw ArgumentError("direct_implicit_solve: more than 10^4 unknowns per step");
  Sp I(m, m);
  I.setIdentity();
  const double h = grid.ht();

  Eigen::SparseLU<Sp> be, bdf;
  be.compute(I / h + L);
  if (be.info() != Eigen::Success) throw ArgumentError("direct_implicit_solve: singular step matrix");
  if (scheme.time == TimeScheme::BDF2) {
    bdf.compute(1.5 / h * I + L);
    if (bdf.info() != Eigen::Success) throw ArgumentError("direct_implicit_solve: singular step matrix");
  }

  OracleResult res;
  res.trajectory = Field(scheme.layout(), grid.nx, grid.nt + 1, 0);
  Slice u0 = project_initial(p.u0, grid, scheme.layout());
  Eigen::VectorXd prev = Eigen::Map<Eigen::VectorXd>(u0.data(), m), prev2;
  std::copy(u0.begin(), u0.end(), res.trajectory.slice(0).begin());
  for (int l = 0; l < grid.nt; ++l) {
    Eigen::VectorXd next;
    if (scheme.time == TimeScheme::BDF2 && l > 0)
      next = bdf.solve((4.0 * prev - prev2) / (2.0 * h));
    else
      next = be.solve(prev / h);
    std::copy(next.data(), next.data() + m, res.trajectory.slice(l + 1).begin());
    prev2 = prev;
    prev = next;
  }
  res.method = scheme.time == TimeScheme::BDF2 ? "direct-bdf2" : "direct-be";
  res.step_size_used = h;
  res.notes = "sparse LU per step matrix";
  return res;
}

Vec2 dg_quadrature_rhs(const FluxSpec& flux, double hx, const Vec2& u_left, const Vec2& u_j) {
  // Lagrange basis on the reference cell [0, 1] through xi = 1/4 and 3/4.
  auto psi0 = [](double xi) { return 1.5 - 2.0 * xi; };
  auto psi1 = [](double xi) { return 2.0 * xi - 0.5; };
  auto uh = [&](const Vec2& u, double xi) { return u[0] * psi0(xi) + u[1] * psi1(xi); };
  auto f = [&](double u) {
    const double s = flux.shift;
    return flux.kind == FluxSpec::Kind::Linear ? (flux.alpha + s) * u : flux.alpha * u * u + (flux.beta + s) * u;
  };

  const double g = 0.5 / std::sqrt(3.0);
  const double xq[2] = {0.5 - g, 0.5 + g};
  // Volume term: int f(u_h) dpsi/dx dx with dpsi0/dx = -2/h, dpsi1/dx = 2/h.
  double vol = 0.0;
  for (double xi : xq) vol += 0.5 * f(uh(u_j, xi));
  vol *= 2.0;  // h * (2/h)
  const double fr = f(uh(u_j, 1.0)), fl = f(uh(u_left, 1.0));
  const double r0 = -vol - fr * psi0(1.0) + fl * psi0(0.0);
  const double r1 = vol - fr * psi1(1.0) + fl * psi1(0.0);
  // Mass matrix h [[7, -1], [-1, 7]] / 12; its inverse is [[7, 1], [1, 7]] / (4 h).
  return {(7.0 * r0 + r1) / (4.0 * hx), (r0 + 7.0 * r1) / (4.0 * hx)};
}

double explicit_step_bound(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid) {
  const double h = grid.hx();
  if (scheme.space == SpaceScheme::FDHeat) {
    double gmax = 0.0;
    for (int j = 0; j < grid.nx; ++j) gmax = std::max(gmax, scheme.gamma(grid.x_min + (j + 0.5) * h));
    return h * h / (2.0 * gmax);
  }
  Slice u0 = project_initial(p.u0, grid, scheme.layout());
  double vmax = 0.0;
  for (double u : u0) {
    FluxSpec f = scheme.flux;
    vmax = std::max(vmax, std::abs(f.df(u) + f.shift));
  }
  if (vmax == 0.0) return grid.ht();
  return h / (3.0 * vmax);
}

OracleResult explicit_reference(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
                                double dt_fine) {
  const double bound = explicit_step_bound(p, scheme, grid);
  if (!(dt_fine > 0.0) || dt_fine > bound * (1.0 + 1e-12))
    throw ArgumentError("explicit_reference: dt_fine violates the stability bound " + std::to_string(bound));
  const int sub = static_cast<int>(std::ceil(grid.ht() / dt_fine - 1e-9));
  const double dt = grid.ht() / sub;
  const double h = grid.hx();
  const int n = grid.nx;

  OracleResult res;
  res.trajectory = Field(scheme.layout(), n, grid.nt + 1, 0);
  std::vector<double> u = project_initial(p.u0, grid, scheme.layout());
  std::copy(u.begin(), u.end(), res.trajectory.slice(0).begin());

  if (scheme.space == SpaceScheme::FDHeat) {
    std::vector<double> gh(n);
    for (int j = 0; j < n; ++j) gh[j] = scheme.gamma(grid.x_min + (j + 0.5) * h);
    std::vector<double> next(n);
    for (int l = 0; l < grid.nt; ++l) {
      for (int s = 0; s < sub; ++s) {
        for (int j = 0; j < n; ++j) {
          const int jp = (j + 1) % n, jm = (j + n - 1) % n;
          next[j] = u[j] + dt / (h * h) * (gh[j] * (u[jp] - u[j]) - gh[jm] * (u[j] - u[jm]));
        }
        std::swap(u, next);
      }
      std::copy(u.begin(), u.end(), res.trajectory.slice(l + 1).begin());
    }
    res.method = "forward-euler-fd";
  } else {
    const std::size_t m = u.size();
    std::vector<double> u1(m), u2(m);
    for (int l = 0; l < grid.nt; ++l) {
      for (int s = 0; s < sub; ++s) {
        auto k = dg_rhs_all(scheme.flux, h, u);
        for (std::size_t i = 0; i < m; ++i) u1[i] = u[i] + dt * k[i];
        k = dg_rhs_all(scheme.flux, h, u1);
        for (std::size_t i = 0; i < m; ++i) u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * k[i]);
        k = dg_rhs_all(scheme.flux, h, u2);
        for (std::size_t i = 0; i < m; ++i) u[i] = u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k[i]);
      }
      std::copy(u.begin(), u.end(), res.trajectory.slice(l + 1).begin());
    }
    res.method = "ssp-rk3-dg";
  }
  if (auto bad = find_non_finite(res.trajectory))
    throw ArgumentError("explicit_reference: non-finite value at level " + std::to_string(bad->level));
  res.step_size_used = dt;
  res.notes = std::to_string(sub) + " substeps per level";
  return res;
}

AdjointCheck adjoint_check(const SchemeConfig& scheme, const SpaceTimeGrid& grid, std::uint64_t seed) {
  if (grid.nx > 16 || grid.nt > 16) throw ArgumentError("adjoint_check: grids up to 16 x 16");
  SpaceTimeOperator op(scheme, grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto random_field = [&](Field f) {
    for (double& v : f.values()) v = U(rng);
    return f;
  };
  AdjointCheck out;
  out.min_order = scheme.linear() ? 0.0 : 1e300;
  for (int trial = 0; trial < 10; ++trial) {
    Field u = random_field(op.make_primal());
    Field phi = random_field(op.make_dual());
    if (scheme.linear()) {
      // Both sides from plain sums, no shared inner-product helper.
      Field Au = op.apply_A(u), Atp = op.apply_AT(phi, u);
      const double w = grid.ht() * grid.hx();
      double lhs = 0.0, rhs = 0.0, scale = 0.0;
      for (int r = 0; r < grid.nt; ++r)
        for (std::size_t i = 0; i < op.slice_size(); ++i) {
          lhs += w * Au.slice(r)[i] * phi.slice(r)[i];
          scale += w * std::abs(Au.slice(r)[i] * phi.slice(r)[i]);
        }
      for (int l = 1; l <= grid.nt; ++l)
        for (std::size_t i = 0; i < op.slice_size(); ++i) rhs += w * u.slice(l)[i] * Atp.slice(l)[i];
      rhs += op.boundary(u, phi);
      out.max_defect = std::max(out.max_defect, std::abs(lhs - rhs) / std::max(scale, 1e-300));
    } else {
      Field delta = random_field(op.make_primal());
      Field Atp = op.apply_AT(phi, u);
      double exact = op.boundary(delta, phi);
      for (int l = 1; l <= grid.nt; ++l)
        for (std::size_t i = 0; i < op.slice_size(); ++i)
          exact += grid.ht() * grid.hx() * delta.slice(l)[i] * Atp.slice(l)[i];
      // Taylor remainder L(u + e d) - L(u) - e <grad, d>: second order in e
      // exactly when the gradient is right, first order otherwise.
      const double base = op.lagrangian(u, phi);
      double defect[2];
      const double eps[2] = {1e-3, 5e-4};
      for (int k = 0; k < 2; ++k) {
        Field up = u;
        for (std::size_t i = 0; i < u.size(); ++i) up.values()[i] += eps[k] * delta.values()[i];
        defect[k] = std::abs(op.lagrangian(up, phi) - base - eps[k] * exact);
      }
      out.max_defect = std::max(out.max_defect, defect[1] / std::max(eps[1] * std::abs(exact), 1e-300));
      out.min_order = std::min(out.min_order, std::log2(defect[0] / defect[1]));
    }
  }
  return out;
}

}  // namespace pdcl
