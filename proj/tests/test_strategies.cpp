#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace pdcl;
using pdcl::test::Gen;

namespace {

Solution fake_solution(const SpaceTimeGrid& g, Layout layout, const std::function<double(double, double)>& f) {
  Solution s;
  s.grid = g;
  s.u = Field(layout, g.nx, g.nt + 1);
  s.phi = Field(layout, g.nx, g.nt + 1);
  s.lambda = Slice(s.u.slice_size(), 0.25);
  for (int l = 0; l <= g.nt; ++l)
    for (std::size_t i = 0; i < s.u.slice_size(); ++i) {
      const double x = point_of(g, layout, i);
      s.u.slice(l)[i] = f(x, g.t(l));
      s.phi.slice(l)[i] = -f(x, g.t(l));
    }
  return s;
}

}  // namespace

TEST_CASE("refine_in_time copies coincident levels and interpolates midpoints") {
  auto g = make_grid(0, 1, 6, 1, 4);
  auto lin = [](double x, double t) { return 2.0 * x - 3.0 * t; };
  auto s = fake_solution(g, Layout::FD, lin);
  auto w = refine_in_time(s, g);
  CHECK(w.grid.nt == 8);
  CHECK(w.u.levels() == 9);
  for (int l = 0; l <= 8; ++l)
    for (int j = 0; j < 6; ++j) {
      CHECK(w.u(l, j) == doctest::Approx(lin(g.node(j), w.grid.t(l))));
      CHECK(w.phi(l, j) == doctest::Approx(-lin(g.node(j), w.grid.t(l))));
    }
  CHECK(w.lambda == s.lambda);
  for (int l = 0; l <= 4; ++l)
    for (int j = 0; j < 6; ++j) CHECK(w.u(2 * l, j) == s.u(l, j));

  auto c = fake_solution(g, Layout::DG2, [](double, double) { return 0.7; });
  auto wc = refine_in_time(c, g);
  for (double v : wc.u.values()) CHECK(v == 0.7);

  CHECK_THROWS_AS(refine_in_time(s, make_grid(0, 1, 6, 1, 8)), ArgumentError);
}

TEST_CASE("a time-linear field keeps its time-derivative residual") {
  // With no spatial term, the BE residual of u = t is 1 on every row at both resolutions.
  auto p = zero_flux_problem();
  auto g = grid_for(p, 4, 4);
  auto s = fake_solution(g, Layout::DG2, [](double, double t) { return t; });
  auto w = refine_in_time(s, g);
  SpaceTimeOperator coarse(scheme_for(p), g), fine(scheme_for(p), w.grid);
  auto rc = residual(coarse, s.u, coarse.make_dual());
  auto rf = residual(fine, w.u, fine.make_dual());
  CHECK(rc.first == doctest::Approx(rf.first));
}

TEST_CASE("m0 = 0 equals the plain solve on one step") {
  auto p = heat_problem();
  PdhgConfig c;
  auto r = solve_with_refinement(p, scheme_for(p), 32, c, {0, 0, 1000});
  auto s = solve(p, scheme_for(p), grid_for(p, 32, 1), c);
  REQUIRE(r.ledger.size() == 1);
  CHECK(r.ledger[0].iterations == s.iterations);
  CHECK(r.solution.iterations == s.iterations);
  CHECK(max_abs_diff(r.solution.u, s.u) == 0.0);
}

TEST_CASE("refinement ledger") {
  auto p = heat_problem();
  PdhgConfig c;
  auto r = solve_with_refinement(p, scheme_for(p), 32, c, {4, 2, 30});
  REQUIRE(r.ledger.size() == 3);
  CHECK(r.ledger[0].nt == 4);
  CHECK(r.ledger[1].nt == 8);
  CHECK(r.ledger[2].nt == 16);
  CHECK(r.ledger[0].iterations == 30);
  CHECK(r.ledger[1].iterations == 30);
  CHECK(r.ledger[2].converged);
  CHECK(r.solution.grid.nt == 16);

  // BDF2 starts at two steps.
  auto t = transport_problem(true);
  PdhgConfig tc;
  tc.tau_u = 3;
  tc.tau_phi = 0.1;
  auto rt = solve_with_refinement(t, scheme_for(t), 8, tc, {2, 0, 10});
  CHECK(rt.ledger.front().nt == 2);
  CHECK_THROWS_AS(solve_with_refinement(p, scheme_for(p), 8, c, {1, 2, 10}), ArgumentError);
}

TEST_CASE("heat: refinement costs at most twice the vanilla solve") {
  auto p = heat_problem();
  PdhgConfig c;
  auto r = solve_with_refinement(p, scheme_for(p), 64, c, {4, 2, 30});
  auto v = solve(p, scheme_for(p), grid_for(p, 64, 16), c);
  auto rows = cost_report({cost_run("vanilla", v), cost_run("refine", r)});
  CHECK(r.solution.converged);
  CHECK(rows[1].ops_per_n <= 2 * rows[0].ops_per_n);
}

TEST_CASE("property: warm starts beat cold starts on every refined level") {
  PdhgConfig c;
  struct Case {
    ProblemSpec p;
    int nx;
    RefinementPlan plan;
    PdhgConfig cfg;
  };
  PdhgConfig tr;
  tr.tau_u = 0.4;
  tr.tau_phi = 0.4;
  tr.eps = 1e-3;
  PdhgConfig tp;
  tp.tau_u = 3;
  tp.tau_phi = 0.1;
  tp.eps = 1e-6;
  std::vector<Case> cases{{heat_problem(), 32, {4, 1, 100}, c},
                          {transport_problem(true), 16, {4, 1, 300}, tp},
                          {traffic_problem(), 32, {3, 1, 300}, tr}};
  for (auto& k : cases) {
    auto r = solve_with_refinement(k.p, scheme_for(k.p), k.nx, k.cfg, k.plan);
    for (std::size_t i = 1; i < r.ledger.size(); ++i) CHECK(r.ledger[i].initial_primal <= r.ledger[i].cold_primal);
  }
}

TEST_CASE("one-timestep windows on a zero-flux problem take one sweep each") {
  auto p = zero_flux_problem(0.4);
  auto r = solve_one_timestep(p, scheme_for(p), grid_for(p, 8, 5), {});
  REQUIRE(r.window_iterations.size() == 5);
  for (int n : r.window_iterations) CHECK(n == 1);
  CHECK(r.solution.iterations == 5);
  for (double v : r.solution.u.values()) CHECK(v == 0.4);
}

TEST_CASE("property: one-timestep equals the direct sequential solve") {
  Gen gen(13);
  PdhgConfig c;
  c.eps = 1e-10;
  c.max_iters = 100000;
  for (int trial = 0; trial < 4; ++trial) {
    const bool heat = trial % 2 == 0;
    auto p = heat ? heat_problem() : transport_problem(true);
    auto t = trial < 2 ? TimeScheme::BackwardEuler : TimeScheme::BDF2;
    auto sc = scheme_for(p, t);
    auto g = grid_for(p, 4 * gen.integer(2, 4), gen.integer(2, 8));
    PdhgConfig cfg = c;
    if (!heat) {
      cfg.tau_u = 3;
      cfg.tau_phi = 0.1;
    }
    auto r = solve_one_timestep(p, sc, g, cfg);
    auto d = direct_implicit_solve(p, sc, g);
    CHECK(r.solution.converged);
    CHECK(max_abs_diff(r.solution.u, d.trajectory) <= 1e-6);
  }
}

TEST_CASE("cost_report on the reference iteration counts") {
  CostRun vanilla{"vanilla", {{4573, 32}}};
  CostRun refine{"refine", {{1000, 8}, {1000, 16}, {3601, 32}}};
  CostRun one{"one-timestep", {}};
  // 8627 sweeps spread over 32 windows.
  for (int l = 0; l < 32; ++l) one.solves.emplace_back(l < 19 ? 270 : 269, 1);
  auto rows = cost_report({vanilla, refine, one});
  CHECK(rows[0].ops_per_n == 150909);
  CHECK(rows[0].world_time == 4573);
  CHECK(rows[1].ops_per_n == 144833);
  CHECK(rows[1].iterations == 5601);
  CHECK(rows[2].iterations == 8627);
  CHECK(rows[2].ops_per_n == 17254);

  auto single = cost_report({{"single", {{1, 1}}}});
  CHECK(single[0].iterations == 1);
  CHECK(single[0].world_time == 1);
  CHECK(single[0].ops_per_n == 2);

  CHECK_THROWS_AS(cost_report({}), ArgumentError);
}

TEST_CASE("property: operation counts are additive") {
  Gen gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    CostRun a{"a", {}}, b{"b", {}}, ab{"ab", {}};
    for (int k = gen.integer(1, 5); k > 0; --k) {
      std::pair<long, int> s{gen.integer(0, 5000), gen.integer(1, 128)};
      (gen.integer(0, 1) ? a : b).solves.push_back(s);
    }
    ab.solves = a.solves;
    ab.solves.insert(ab.solves.end(), b.solves.begin(), b.solves.end());
    auto rows = cost_report({a, b, ab});
    CHECK(rows[0].ops_per_n + rows[1].ops_per_n == rows[2].ops_per_n);
    CHECK(rows[0].iterations + rows[1].iterations == rows[2].iterations);
  }
}
