#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace pdcl;
using pdcl::test::Gen;

TEST_CASE("heat problem") {
  auto p = heat_problem();
  CHECK(p.gamma(0.25) == doctest::Approx(0.6));
  CHECK(p.gamma(0.75) == doctest::Approx(0.4));
  CHECK(p.u0(0.5) == 1.0);
  CHECK(p.T == 0.1);
  CHECK(p.time == TimeScheme::BackwardEuler);
  CHECK(p.space == SpaceScheme::FDHeat);
  // h_t / h_x^2 on the mesh-independence meshes.
  const int nxs[] = {64, 128, 256, 512}, nts[] = {16, 32, 64, 128};
  const double ratios[] = {128.0 / 5, 256.0 / 5, 512.0 / 5, 1024.0 / 5};
  for (int k = 0; k < 4; ++k) {
    auto g = grid_for(p, nxs[k], nts[k]);
    CHECK(g.ht() / (g.hx() * g.hx()) == doctest::Approx(ratios[k]));
  }
}

TEST_CASE("transport problems") {
  auto s = transport_problem(true);
  auto g = grid_for(s, 64, 32);
  CHECK(s.flux.alpha * g.ht() / g.hx() == doctest::Approx(2.0));
  auto b = transport_problem(false);
  auto gb = grid_for(b, 64, 32);
  CHECK(b.flux.alpha * gb.ht() / gb.hx() == doctest::Approx(1.0));
  CHECK(b.u0(0.5) == 1.0);
  CHECK(b.u0(0.1) == 0.0);
  CHECK(s.time == TimeScheme::BDF2);
  CHECK(s.space == SpaceScheme::DGLinear);
  CHECK(analytic_transport(s.u0, 2.0, 0.3, 0.0) == doctest::Approx(s.u0(0.3)));
  CHECK(analytic_transport(s.u0, 2.0, 0.3, 0.1) == doctest::Approx(s.u0(0.1)));
  CHECK(analytic_transport(s.u0, 2.0, 0.3, 0.5) == doctest::Approx(s.u0(0.3)));
  CHECK(analytic_transport(b.u0, 2.0, 0.5, 0.25) == b.u0(0.0));
  CHECK(analytic_transport(b.u0, 2.0, 0.1, 0.25) == doctest::Approx(b.u0(0.6)));
}

TEST_CASE("traffic problem") {
  auto p = traffic_problem();
  CHECK(p.flux.f(0.25) == doctest::Approx(0.1875));
  CHECK(p.flux.f(0.1) == doctest::Approx(0.09));
  CHECK(p.u0(1.5) == 0.1);
  CHECK(p.u0(0.5) == 0.25);
  auto g = grid_for(p, 256, 32);
  auto init = project_initial(p.u0, g, Layout::DG2);
  CHECK(monotonicity_shift(p.flux, init) == 0.0);
  for (double v : init) CHECK(p.flux.df(v) >= 0.0);
  const double rh = (p.flux.f(0.25) - p.flux.f(0.1)) / (0.25 - 0.1);
  CHECK(rh == doctest::Approx(0.65));
  CHECK(p.k_kind == KKind::NonlinearLaw);
}

TEST_CASE("make_problem") {
  for (const auto& n : problem_names()) CHECK(make_problem(n).name == n);
  auto h = make_problem("heat", {{"gamma1", 0.0}});
  CHECK(h.gamma(0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_problem("heat", {{"nope", 1.0}}), ArgumentError);
  CHECK_THROWS_AS(make_problem("wave"), ArgumentError);
  auto z = zero_flux_problem(0.2);
  CHECK(z.u0(0.9) == 0.2);
}

TEST_CASE("convergence_order") {
  auto o = convergence_order({0.1296, 0.0372, 0.0096});
  CHECK(o[0] == doctest::Approx(1.8007).epsilon(1e-4));
  CHECK(o[1] == doctest::Approx(1.9542).epsilon(1e-4));
  CHECK(convergence_order({1.0, 0.25})[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(convergence_order({1.0}), ArgumentError);
  CHECK_THROWS_AS(convergence_order({1.0, 0.0}), ArgumentError);
}

TEST_CASE("l2_error and point_of") {
  auto g = make_grid(0, 1, 4, 1, 2);
  CHECK(point_of(g, Layout::FD, 3) == doctest::Approx(0.75));
  CHECK(point_of(g, Layout::DG2, 3) == doctest::Approx(0.4375));
  Field u(Layout::DG2, 4, 3);
  auto f = [](double x, double t) { return x + t; };
  for (int l = 0; l <= 2; ++l)
    for (std::size_t i = 0; i < 8; ++i) u.slice(l)[i] = f(point_of(g, Layout::DG2, i), g.t(l));
  CHECK(l2_error(u, f, g) == 0.0);
  // Unit error everywhere: sqrt(h_t h_x * 3 levels * 8 values).
  CHECK(l2_error(u, [&](double x, double t) { return f(x, t) + 1; }, g) ==
        doctest::Approx(std::sqrt(0.5 * 0.25 * 24)));
}

TEST_CASE("cell_means and unshift") {
  std::vector<double> s{1, 3, 2, 2};
  auto m = cell_means(s);
  CHECK(m == std::vector<double>{2, 2});
  auto g = make_grid(0, 1, 8, 1, 4);
  Gen gen(1);
  Field v = gen.field(Layout::DG2, 8, 5);
  CHECK(max_abs_diff(unshift(v, 0.0, g), v) == 0.0);
  // A linear-in-space field on one cell shifts exactly within that cell.
  Field w(Layout::DG2, 8, 5);
  for (int l = 0; l <= 4; ++l)
    for (int j = 0; j < 8; ++j)
      for (int d = 0; d < 2; ++d) w(l, j, d) = 3.0 + 2.0 * (g.dg_point(j, d) - g.node(j));
  Field u = unshift(w, 0.01 / g.T, g);
  // Shift of 0.01 t; at t = 0 nothing moves.
  for (int j = 0; j < 8; ++j) CHECK(u(0, j, 0) == doctest::Approx(w(0, j, 0)));
  CHECK(u(4, 0, 0) == doctest::Approx(w(4, 0, 0) + 2.0 * 0.01));
  CHECK_THROWS_AS(unshift(Field(Layout::FD, 8, 5), 0.1, g), ArgumentError);
}

TEST_CASE("property: smooth initial data is periodic and the analytic solution has period 1 / alpha") {
  Gen gen(8);
  auto s = transport_problem(true);
  auto h = heat_problem();
  CHECK(s.u0(0.0) == doctest::Approx(s.u0(1.0)).scale(1.0));
  CHECK(h.u0(0.0) == doctest::Approx(h.u0(1.0)));
  for (int trial = 0; trial < 100; ++trial) {
    const double a = gen.uniform(0.5, 3), x = gen.uniform(0, 1), t = gen.uniform(0, 2);
    CHECK(analytic_transport(s.u0, a, x, t + 1.0 / a) == doctest::Approx(analytic_transport(s.u0, a, x, t)));
    CHECK(analytic_transport(s.u0, a, x + 1.0, t) == doctest::Approx(analytic_transport(s.u0, a, x, t)));
  }
}

TEST_CASE("property: the traffic spatial operator conserves mass") {
  Gen gen(9);
  auto p = traffic_problem();
  for (int trial = 0; trial < 30; ++trial) {
    const int nx = gen.integer(2, 16);
    auto g = grid_for(p, nx, 2);
    SpaceTimeOperator op(scheme_for(p), g);
    Slice v(2 * nx), out(2 * nx);
    for (double& x : v) x = gen.uniform(0.0, 0.5);
    op.spatial(v, out);
    double total = 0.0, scale = 0.0;
    for (double x : out) {
      total += x;
      scale += std::abs(x);
    }
    CHECK(std::abs(total) <= 1e-13 * scale);
  }
}
