#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace pdcl;
using pdcl::test::Gen;

TEST_CASE("make_grid computes step sizes") {
  auto g = make_grid(0, 1, 16, 0.1, 64);
  CHECK(g.hx() == doctest::Approx(1.0 / 16));
  CHECK(g.ht() == doctest::Approx(0.1 / 64));

  auto t = make_grid(0, 2, 256, 1, 32);
  CHECK(t.hx() == doctest::Approx(1.0 / 128));
  CHECK(t.ht() == doctest::Approx(1.0 / 32));

  auto s = make_grid(0, 1, 2, 1, 1);
  CHECK(s.hx() == 0.5);
  CHECK(s.ht() == 1.0);
  CHECK(s.t(1) == 1.0);
}

TEST_CASE("make_grid rejects bad sizes and extents") {
  CHECK_THROWS_AS(make_grid(0, 1, 1, 1, 1), ArgumentError);
  CHECK_THROWS_AS(make_grid(0, 1, 4, 1, 0), ArgumentError);
  CHECK_THROWS_AS(make_grid(1, 1, 4, 1, 1), ArgumentError);
  CHECK_THROWS_AS(make_grid(0, 1, 4, 0.0, 1), ArgumentError);
}

TEST_CASE("DG quarter points sit at x_{j -+ 1/4}") {
  auto g = make_grid(0, 1, 4, 1, 1);
  CHECK(g.dg_point(0, 0) == doctest::Approx(1.0 / 16));
  CHECK(g.dg_point(0, 1) == doctest::Approx(3.0 / 16));
  CHECK(g.dg_point(3, 1) == doctest::Approx(15.0 / 16));
}

TEST_CASE("project_initial") {
  auto g = make_grid(0, 1, 4, 1, 1);
  auto z = project_initial([](double) { return 0.0; }, g, Layout::DG2);
  CHECK(z.size() == 8);
  for (double v : z) CHECK(v == 0.0);

  auto s = project_initial([](double x) { return std::sin(2 * std::numbers::pi * x); }, g, Layout::FD);
  const double expect[4] = {0, 1, 0, -1};
  for (int j = 0; j < 4; ++j) CHECK(s[j] == doctest::Approx(expect[j]).epsilon(1e-15));

  auto g64 = make_grid(0, 1, 64, 0.1, 16);
  auto gauss = project_initial([](double x) { return std::exp(-64 * (x - 0.5) * (x - 0.5)); }, g64, Layout::FD);
  CHECK(gauss[32] == 1.0);
  CHECK(gauss[0] == doctest::Approx(std::exp(-16.0)));

  auto d = project_initial([](double x) { return x; }, g, Layout::DG2);
  CHECK(d[0] == doctest::Approx(1.0 / 16));
  CHECK(d[1] == doctest::Approx(3.0 / 16));

  CHECK_THROWS_AS(project_initial([](double) { return std::nan(""); }, g, Layout::FD), ArgumentError);
}

TEST_CASE("inner_product examples") {
  auto g = make_grid(0, 1, 8, 1, 4);
  Gen gen(1);
  Field zero(Layout::FD, 8, 4, 1);
  Field b = gen.field(Layout::FD, 8, 4, 1);
  CHECK(inner_product(zero, b, g) == 0.0);

  // Constant one over l = 1..N_t integrates to the total quadrature weight.
  Field one(Layout::FD, 8, 4, 1);
  for (double& v : one.values()) v = 1.0;
  CHECK(inner_product(one, one, g) == doctest::Approx(1.0));
  Field one_dg(Layout::DG2, 8, 4, 1);
  for (double& v : one_dg.values()) v = 1.0;
  CHECK(inner_product(one_dg, one_dg, g) == doctest::Approx(2.0 * g.ht() * g.hx() * 8 * 4));

  CHECK_THROWS_AS(inner_product(one, one_dg, g), ArgumentError);
}

TEST_CASE("inner_product matches long double summation on random 4x4 fields") {
  auto g = make_grid(0, 1, 4, 1, 4);
  Gen gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    Field a = gen.field(Layout::DG2, 4, 5), b = gen.field(Layout::DG2, 4, 5);
    long double s = 0;
    for (int l = 0; l <= 4; ++l)
      for (int j = 0; j < 4; ++j)
        for (int d = 0; d < 2; ++d) s += static_cast<long double>(a(l, j, d)) * b(l, j, d);
    s *= static_cast<long double>(g.ht()) * g.hx();
    CHECK(inner_product(a, b, g) == doctest::Approx(static_cast<double>(s)).epsilon(1e-14));
  }
}

TEST_CASE("property: periodic wrap") {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(2, 40);
    const int j = gen.integer(-3 * n, 3 * n);
    CHECK(wrap(j, n) == wrap(j + n, n));
    CHECK(wrap(j, n) >= 0);
    CHECK(wrap(j, n) < n);
  }
  CHECK(wrap(-1, 7) == 6);
  CHECK(wrap(7, 7) == 0);
}

TEST_CASE("property: inner product symmetry and positivity") {
  Gen gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int nx = gen.integer(2, 16), nt = gen.integer(1, 16);
    auto g = make_grid(0, 1, nx, 1, nt);
    const Layout layout = trial % 2 ? Layout::FD : Layout::DG2;
    Field a = gen.field(layout, nx, nt + 1), b = gen.field(layout, nx, nt + 1);
    CHECK(inner_product(a, b, g) == inner_product(b, a, g));
    CHECK(inner_product(a, a, g) > 0.0);
  }
}

TEST_CASE("find_non_finite reports the index") {
  Field f(Layout::DG2, 3, 4);
  CHECK_FALSE(find_non_finite(f));
  f(2, 1, 1) = INFINITY;
  auto bad = find_non_finite(f);
  REQUIRE(bad);
  CHECK(bad->level == 2);
  CHECK(bad->cell == 1);
  CHECK(bad->dof == 1);
}

TEST_CASE("restrict_levels copies a level range") {
  Gen gen(3);
  Field f = gen.field(Layout::FD, 4, 5);
  Field r = restrict_levels(f, 1, 3);
  CHECK(r.first_level() == 1);
  CHECK(r.levels() == 3);
  CHECK(r(2, 3) == f(2, 3));
  CHECK_THROWS_AS(restrict_levels(f, 0, 5), ArgumentError);
}
