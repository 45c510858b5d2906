#include "pdcl/strategies.hpp"

#include <cmath>
#include <limits>

namespace pdcl {

WarmStart refine_in_time(const Solution& sol, const SpaceTimeGrid& grid) {
  const int nt = grid.nt;
  if (sol.u.levels() != nt + 1 || sol.phi.levels() != nt + 1 || !(sol.grid == grid))
    throw ArgumentError("refine_in_time: solution does not live on the given grid");
  SpaceTimeGrid fine = grid;
  fine.nt = 2 * nt;
  auto interp = [&](const Field& c) {
    Field f(c.layout(), c.nx(), 2 * nt + 1, 0);
    const std::size_t m = c.slice_size();
    for (int l = 0; l <= nt; ++l) {
      auto src = c.slice(l);
      std::copy(src.begin(), src.end(), f.slice(2 * l).begin());
      if (l < nt) {
        auto a = c.slice(l), b = c.slice(l + 1);
        auto mid = f.slice(2 * l + 1);
        for (std::size_t i = 0; i < m; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      }
    }
    return f;
  };
  return {interp(sol.u), interp(sol.phi), sol.lambda, fine};
}

RefinementResult solve_with_refinement(const ProblemSpec& p, const SchemeConfig& scheme, int nx,
                                       const PdhgConfig& config, const RefinementPlan& plan) {
  int start = plan.start;
  if (scheme.time == TimeScheme::BDF2) start = std::max(start, 1);
  if (plan.m0 < start || plan.m0 > 20) throw ArgumentError("refinement: m0 must lie in [start, 20]");
  RefinementResult out;
  std::optional<Solution> prev;
  for (int k = start; k <= plan.m0; ++k) {
    const bool last = k == plan.m0;
    SpaceTimeGrid grid = grid_for(p, nx, 1 << k);
    SpaceTimeOperator op(scheme, grid);
    KOperator K = problem_K(p, op);
    PdhgConfig cfg = config;
    if (!last) {
      cfg.max_iters = plan.coarse_iters;
      cfg.eps = std::numeric_limits<double>::min();
    }
    PdhgSolver solver(op, K, cfg, project_initial(p.u0, grid, scheme.layout()));
    PdhgState cold = solver.initial_state();
    LevelRecord rec;
    rec.nt = grid.nt;
    rec.cold_primal = cold.history.front().primal;
    PdhgState s = cold;
    if (prev) {
      WarmStart w = refine_in_time(*prev, prev->grid);
      s = solver.warm_state(std::move(w.u), std::move(w.phi), std::move(w.lambda));
    }
    rec.initial_primal = s.history.front().primal;
    try {
      prev = solver.run(std::move(s));
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.iteration, std::string("level N_t=") + std::to_string(grid.nt) + ": " + e.what());
    }
    rec.iterations = prev->iterations;
    rec.converged = prev->converged;
    out.ledger.push_back(rec);
  }
  out.solution = std::move(*prev);
  return out;
}

OneStepResult solve_one_timestep(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
                                 const PdhgConfig& config) {
  const Layout layout = scheme.layout();
  SpaceTimeGrid win = make_grid(grid.x_min, grid.x_max, grid.nx, grid.ht(), 1);
  PdhgConfig cfg = config;
  cfg.slice_residual = true;

  OneStepResult out;
  Solution& sol = out.solution;
  sol.grid = grid;
  sol.u = Field(layout, grid.nx, grid.nt + 1, 0);
  sol.phi = Field(layout, grid.nx, grid.nt + 1, 0);
  sol.converged = true;
  Slice current = project_initial(p.u0, grid, layout);
  std::copy(current.begin(), current.end(), sol.u.slice(0).begin());

  // Backward Euler windows share one operator; BDF2 windows after the first
  // carry the previous slice as history and get rebuilt each step.
  std::optional<SpaceTimeOperator> be_op;
  std::optional<KOperator> be_K, bdf_K;
  std::optional<Slice> history;
  SchemeConfig first = scheme;
  first.time = TimeScheme::BackwardEuler;
  for (int l = 0; l < grid.nt; ++l) {
    const bool with_history = scheme.time == TimeScheme::BDF2 && l > 0;
    std::optional<SpaceTimeOperator> hist_op;
    const SpaceTimeOperator* op;
    const KOperator* K;
    if (with_history) {
      hist_op.emplace(scheme, win, history);
      if (!bdf_K) bdf_K.emplace(problem_K(p, *hist_op));
      op = &*hist_op;
      K = &*bdf_K;
    } else {
      if (!be_op) {
        be_op.emplace(first, win);
        be_K.emplace(problem_K(p, *be_op));
      }
      op = &*be_op;
      K = &*be_K;
    }
    PdhgSolver solver(*op, *K, cfg, current);
    Solution w;
    try {
      w = solver.run(solver.initial_state());
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.iteration, "window l=" + std::to_string(l) + ": " + e.what());
    }
    out.window_iterations.push_back(w.iterations);
    sol.iterations += w.iterations;
    sol.converged = sol.converged && w.converged;
    for (const auto& r : w.history)
      sol.history.push_back({static_cast<int>(sol.history.size()), r.primal, r.dual});
    history = current;
    auto next = w.u.slice(1);
    current.assign(next.begin(), next.end());
    std::copy(current.begin(), current.end(), sol.u.slice(l + 1).begin());
    sol.lambda = w.lambda;
  }
  return out;
}

CostRun cost_run(const std::string& label, const Solution& sol) {
  return {label, {{sol.iterations, sol.grid.nt}}};
}

CostRun cost_run(const std::string& label, const RefinementResult& r) {
  CostRun c{label, {}};
  for (const auto& l : r.ledger) c.solves.emplace_back(l.iterations, l.nt);
  return c;
}

CostRun cost_run(const std::string& label, const OneStepResult& r) {
  CostRun c{label, {}};
  for (int n : r.window_iterations) c.solves.emplace_back(n, 1);
  return c;
}

std::vector<CostRow> cost_report(const std::vector<CostRun>& runs) {
  if (runs.empty()) throw ArgumentError("cost_report: no runs");
  std::vector<CostRow> rows;
  for (const auto& run : runs) {
    CostRow row{run.label, 0, 0, 0};
    for (const auto& [iters, nt] : run.solves) {
      row.iterations += iters;
      row.ops_per_n += iters * static_cast<long>(nt + 1);
    }
    row.world_time = row.iterations;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pdcl
