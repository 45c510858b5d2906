// pdcl-cli: run single solves, regenerate the benchmark tables and figure data,
// and run the oracle checks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pdcl/pdcl.hpp"

using namespace pdcl;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDiverged = 3, kNotConverged = 4 };

struct Flags {
  std::string config;
  std::optional<std::string> out, strategy, scheme, time_scheme, problem;
  std::optional<int> nx, nt, max_iters;
  std::optional<double> eps, tau_u, tau_phi, tau_lambda;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

void add_run_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "config file (key = value)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--problem", f.problem, "heat | transport-smooth | transport-discontinuous | traffic | zero-flux");
  app->add_option("--nx", f.nx, "spatial cells");
  app->add_option("--nt", f.nt, "time steps");
  app->add_option("--eps", f.eps, "stopping tolerance");
  app->add_option("--tau-u", f.tau_u);
  app->add_option("--tau-phi", f.tau_phi);
  app->add_option("--tau-lambda", f.tau_lambda);
  app->add_option("--strategy", f.strategy, "vanilla | refine | one-timestep");
  app->add_option("--scheme", f.scheme, "fd-heat | dg-linear | dg-quadratic");
  app->add_option("--time-scheme", f.time_scheme, "be | bdf2");
  app->add_option("--max-iters", f.max_iters);
  app->add_option("--seed", f.seed);
  app->add_flag("--strict", f.strict, "exit 4 when a run stops before converging");
}

// Flags override the config file, which overrides the defaults.
RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.problem) {
    c.problem = *f.problem;
    c.problem_params.clear();
  }
  if (f.out) c.out_dir = *f.out;
  if (f.nx) c.nx = *f.nx;
  if (f.nt) c.nt = *f.nt;
  if (f.eps) c.eps = *f.eps;
  if (f.tau_u) c.tau_u = *f.tau_u;
  if (f.tau_phi) c.tau_phi = *f.tau_phi;
  if (f.tau_lambda) c.tau_lambda = *f.tau_lambda;
  if (f.strategy) c.strategy = parse_strategy(*f.strategy);
  if (f.scheme) c.space_scheme = *f.scheme;
  if (f.time_scheme) c.time_scheme = *f.time_scheme;
  if (f.max_iters) c.max_iters = *f.max_iters;
  if (f.seed) c.seed = *f.seed;
  // Round-trip through the parser so flag values get the same validation.
  return parse_config(serialize_config(c));
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

std::optional<Fn2> analytic_reference(const ProblemSpec& p) {
  if (p.name.rfind("transport", 0) != 0) return std::nullopt;
  return [p](double x, double t) { return analytic_transport(p.u0, p.flux.alpha, x, t, p.x_min, p.x_max - p.x_min); };
}

// Vanilla PDHG with the reference error recorded after every sweep.
Solution run_tracked(const ProblemSpec& p, const SchemeConfig& sc, const SpaceTimeGrid& g, const PdhgConfig& cfg,
                     const Fn2& ref, std::vector<double>& errors) {
  SpaceTimeOperator op(sc, g);
  KOperator K = problem_K(p, op);
  PdhgSolver solver(op, K, cfg, project_initial(p.u0, g, sc.layout()));
  PdhgState s = solver.initial_state();
  errors = {l2_error(s.u, ref, g)};
  bool converged = false;
  while (s.n < cfg.max_iters) {
    solver.iterate(s);
    errors.push_back(l2_error(s.u, ref, g));
    if (s.history.back().primal <= cfg.eps && s.history.back().dual <= cfg.eps) {
      converged = true;
      break;
    }
  }
  Solution sol;
  sol.u = std::move(s.u);
  sol.phi = std::move(s.phi);
  sol.lambda = std::move(s.lambda);
  sol.iterations = s.n;
  sol.converged = converged;
  sol.history = std::move(s.history);
  sol.grid = g;
  return sol;
}

struct RunOutput {
  Solution solution;
  std::vector<double> errors;
  std::vector<CostRow> cost;
};

RunOutput run_config(const RunConfig& c) {
  const ProblemSpec p = c.problem_spec();
  const SchemeConfig sc = c.scheme(p);
  const SpaceTimeGrid g = grid_for(p, c.nx, c.nt);
  const PdhgConfig cfg = c.pdhg();
  RunOutput out;
  switch (c.strategy) {
    case StrategyKind::Vanilla:
      if (auto ref = analytic_reference(p)) {
        if (cfg.enforce_bound) {
          // solve() does the step-size check; zero sweeps makes it only that.
          PdhgConfig probe = cfg;
          probe.max_iters = 0;
          (void)solve(p, sc, g, probe);
        }
        out.solution = run_tracked(p, sc, g, cfg, *ref, out.errors);
      } else {
        out.solution = solve(p, sc, g, cfg);
      }
      out.cost = cost_report({cost_run("vanilla", out.solution)});
      break;
    case StrategyKind::Refine: {
      if ((1 << c.refine_m0) != c.nt) throw ConfigError("strategy.m0", 0, "2^m0 must equal grid.nt");
      auto r = solve_with_refinement(p, sc, c.nx, cfg, {c.refine_m0, c.refine_start, c.refine_coarse_iters});
      out.cost = cost_report({cost_run("refine", r)});
      out.solution = std::move(r.solution);
      break;
    }
    case StrategyKind::OneTimestep: {
      auto r = solve_one_timestep(p, sc, g, cfg);
      out.cost = cost_report({cost_run("one-timestep", r)});
      out.solution = std::move(r.solution);
      break;
    }
  }
  return out;
}

void write_run(const RunConfig& c, const RunOutput& r, const std::string& prefix) {
  const auto meta = run_metadata(c, r.solution.grid);
  write_solution_csv(r.solution.u, r.solution.grid, out_path(c, prefix + "solution.csv").string(), meta);
  write_residual_csv(r.solution.history, out_path(c, prefix + "residual.csv").string(), meta, r.errors);
}

int cmd_solve(const Flags& f) {
  const RunConfig c = resolve(f);
  RunOutput r = run_config(c);
  write_run(c, r, "");
  std::ofstream(out_path(c, "config.cfg")) << serialize_config(c);
  const auto& s = r.solution;
  std::printf("%s %s: %d iterations, %s, residual (%.3e, %.3e), ops/N %ld\n", c.problem.c_str(),
              to_string(c.strategy).c_str(), s.iterations, s.converged ? "converged" : "NOT converged",
              s.history.back().primal, s.history.back().dual, r.cost.front().ops_per_n);
  std::printf("wrote %s\n", out_path(c, "solution.csv").c_str());
  return (!s.converged && f.strict) ? kNotConverged : kOk;
}

int cmd_table1(const Flags& f) {
  RunConfig base = resolve(f);
  base.problem = "heat";
  base.problem_params.clear();
  const int nxs[] = {64, 128, 256, 512}, nts[] = {16, 32, 64, 128};
  std::ofstream csv(out_path(base, "table1.csv"));
  csv << "eps,mesh,iterations,converged,ht_over_hx2\n";
  std::printf("%-8s %10s %10s %10s %10s\n", "eps", "64x16", "128x32", "256x64", "512x128");
  bool all = true;
  for (double eps : {1e-6, 1e-10}) {
    std::printf("%-8.0e", eps);
    for (int k = 0; k < 4; ++k) {
      RunConfig c = base;
      c.nx = nxs[k];
      c.nt = nts[k];
      c.eps = eps;
      auto p = c.problem_spec();
      auto g = grid_for(p, c.nx, c.nt);
      auto s = solve(p, c.scheme(p), g, c.pdhg());
      all = all && s.converged;
      std::printf(" %10d", s.iterations);
      csv << fmt_num(eps) << "," << nxs[k] << "x" << nts[k] << "," << s.iterations << "," << s.converged << ","
          << fmt_num(g.ht() / (g.hx() * g.hx())) << "\n";
    }
    std::printf("\n");
  }
  return (!all && f.strict) ? kNotConverged : kOk;
}

int cmd_table2(const Flags& f) {
  RunConfig base = resolve(f);
  base.problem = "transport-smooth";
  base.problem_params.clear();
  if (!f.tau_u) base.tau_u = 3;
  if (!f.tau_phi) base.tau_phi = 0.1;
  if (!f.eps) base.eps = 1e-8;
  if (!f.max_iters) base.max_iters = 100000;
  std::vector<double> errs;
  std::vector<int> hs;
  bool all = true;
  std::ofstream csv(out_path(base, "table2.csv"));
  csv << "h,nx,nt,iterations,error,order\n";
  for (int k : {5, 6, 7}) {
    RunConfig c = base;
    c.nx = 1 << k;
    c.nt = c.nx / 2;
    auto p = c.problem_spec();
    auto g = grid_for(p, c.nx, c.nt);
    auto s = solve(p, c.scheme(p), g, c.pdhg());
    all = all && s.converged;
    errs.push_back(l2_error(s.u, *analytic_reference(p), g));
    hs.push_back(s.iterations);
  }
  auto o = convergence_order(errs);
  std::printf("%-10s %10s %10s %10s\n", "h", "2^-5", "2^-6", "2^-7");
  std::printf("%-10s %10.4f %10.4f %10.4f\n", "L2 error", errs[0], errs[1], errs[2]);
  std::printf("%-10s %10.4f %10.4f %10s\n", "order", o[0], o[1], "-");
  std::printf("%-10s %10d %10d %10d\n", "iterations", hs[0], hs[1], hs[2]);
  for (int i = 0; i < 3; ++i)
    csv << fmt_num(std::ldexp(1.0, -(5 + i))) << "," << (32 << i) << "," << (16 << i) << "," << hs[i] << ","
        << fmt_num(errs[i]) << "," << (i < 2 ? fmt_num(o[i]) : "") << "\n";
  return (!all && f.strict) ? kNotConverged : kOk;
}

int cmd_table3(const Flags& f) {
  RunConfig base = resolve(f);
  base.problem = "traffic";
  base.problem_params.clear();
  if (!f.nx) base.nx = 256;
  if (!f.nt) base.nt = 32;
  if (!f.tau_u) base.tau_u = 0.4;
  if (!f.tau_phi) base.tau_phi = 0.4;
  if (!f.eps) base.eps = 1e-3;
  if (!f.max_iters) base.max_iters = 100000;
  auto p = base.problem_spec();
  auto sc = base.scheme(p);
  auto g = grid_for(p, base.nx, base.nt);
  auto cfg = base.pdhg();
  int m0 = 0;
  while ((1 << m0) < base.nt) ++m0;
  auto vanilla = solve(p, sc, g, cfg);
  auto refine = solve_with_refinement(p, sc, base.nx, cfg, {m0, std::max(0, m0 - 2), base.refine_coarse_iters});
  auto one = solve_one_timestep(p, sc, g, cfg);
  auto rows = cost_report({cost_run("primal-dual (vanilla)", vanilla), cost_run("mesh refinement", refine),
                           cost_run("one-timestep", one)});
  std::ofstream csv(out_path(base, "table3.csv"));
  csv << "method,iterations,world_time,ops_per_n\n";
  std::printf("%-24s %12s %12s %14s\n", "method", "iterations", "world time", "operations");
  for (const auto& r : rows) {
    std::printf("%-24s %12ld %12ld %13ldN\n", r.label.c_str(), r.iterations, r.world_time, r.ops_per_n);
    csv << r.label << "," << r.iterations << "," << r.world_time << "," << r.ops_per_n << "\n";
  }
  std::printf("refinement ledger:");
  for (const auto& l : refine.ledger) std::printf(" N_t=%d:%d", l.nt, l.iterations);
  std::printf("\n");
  const bool all = vanilla.converged && refine.solution.converged && one.solution.converged;
  return (!all && f.strict) ? kNotConverged : kOk;
}

int cmd_figures(const Flags& f) {
  RunConfig base = resolve(f);
  struct Fig {
    std::string prefix, problem;
    int nx, nt;
    double tau_u, tau_phi, eps;
  };
  const Fig figs[] = {{"fig1_", "transport-smooth", 64, 32, 3, 0.1, 1e-8},
                      {"fig2_", "transport-discontinuous", 64, 32, 3, 0.1, 1e-8},
                      {"fig3_", "traffic", 256, 32, 0.4, 0.4, 1e-3}};
  for (const auto& fig : figs) {
    RunConfig c = base;
    c.problem = fig.problem;
    c.problem_params.clear();
    c.nx = fig.nx;
    c.nt = fig.nt;
    c.tau_u = fig.tau_u;
    c.tau_phi = fig.tau_phi;
    c.eps = f.eps ? *f.eps : fig.eps;
    c.max_iters = f.max_iters ? *f.max_iters : 100000;
    c.strategy = StrategyKind::Vanilla;
    auto r = run_config(c);
    write_run(c, r, fig.prefix);
    std::printf("%s: %d iterations -> %s\n", fig.prefix.c_str(), r.solution.iterations,
                out_path(c, fig.prefix + "solution.csv").c_str());
  }
  return kOk;
}

int cmd_check(const Flags& f) {
  (void)f;
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, double value) {
    std::printf("[%s] %-44s %.3e\n", pass ? "PASS" : "FAIL", name.c_str(), value);
    ok = ok && pass;
  };
  for (const char* name : {"heat", "transport-smooth"}) {
    auto p = make_problem(name);
    for (auto t : {TimeScheme::BackwardEuler, TimeScheme::BDF2}) {
      auto sc = scheme_for(p, t);
      auto g = grid_for(p, 16, 16);
      auto a = adjoint_check(sc, g, 1);
      line(std::string(name) + " " + to_string(t) + " adjoint defect", a.max_defect <= 1e-12, a.max_defect);
      SpaceTimeOperator op(sc, g);
      auto d = direct_implicit_solve(p, sc, g);
      const double r = max_abs(op.apply_A(d.trajectory).values());
      line(std::string(name) + " " + to_string(t) + " direct-solve residual", r <= 1e-11, r);
    }
  }
  auto q = traffic_problem();
  auto a = adjoint_check(scheme_for(q), grid_for(q, 16, 16), 1);
  line("traffic Taylor-remainder order", a.min_order >= 1.9, a.min_order);
  const double hx = 0.1;
  auto m = dg_matrices(q.flux, hx);
  Vec2 ul{0.2, 0.15}, uj{0.1, 0.3};
  auto x = dg_quadratic_rhs(m, ul, uj, uj), y = dg_quadrature_rhs(q.flux, hx, ul, uj);
  const double gap = std::max(std::abs(x[0] - y[0]), std::abs(x[1] - y[1]));
  line("DG matrices vs quadrature weak form", gap <= 1e-12, gap);
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual space-time solver for implicit schemes of 1D conservation laws"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Flags&);
  };
  const Sub subs[] = {{"solve", "run one configuration and write solution and residual CSVs", cmd_solve},
                      {"table1", "heat equation iteration counts over four meshes", cmd_table1},
                      {"table2", "transport errors and convergence orders", cmd_table2},
                      {"table3", "traffic problem cost of the three strategies", cmd_table3},
                      {"figure-data", "(x, t, u) triples and residual curves for the three figures", cmd_figures},
                      {"check", "oracle validation suite", cmd_check}};
  int (*chosen)(const Flags&) = nullptr;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_run_flags(sub, flags);
    sub->callback([&chosen, fn = s.fn] { chosen = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }
  try {
    return chosen(flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDiverged;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}
