#pragma once

#include <string>
#include <vector>

#include "pdcl/pdhg.hpp"

namespace pdcl {

/// Levels N_t = 2^start, ..., 2^m0. Every level but the last runs exactly
/// coarse_iters sweeps; the last runs to eps.
struct RefinementPlan {
  int m0 = 5;
  int start = 0;
  int coarse_iters = 1000;
};

struct LevelRecord {
  int nt = 0;
  int iterations = 0;
  double initial_primal = 0.0;
  double cold_primal = 0.0;
  bool converged = false;
};

struct RefinementResult {
  Solution solution;
  std::vector<LevelRecord> ledger;
};

struct WarmStart {
  Field u, phi;
  Slice lambda;
  SpaceTimeGrid grid;
};

/// Transfers a solution to 2 N_t steps: coincident levels are copied, the new
/// midpoints are linear in time, lambda is copied.
WarmStart refine_in_time(const Solution& sol, const SpaceTimeGrid& grid);

RefinementResult solve_with_refinement(const ProblemSpec& p, const SchemeConfig& scheme, int nx,
                                       const PdhgConfig& config, const RefinementPlan& plan);

struct OneStepResult {
  Solution solution;
  std::vector<int> window_iterations;
};

/// PDHG as the inner solver of the implicit scheme, one time step per window.
/// Window residuals are measured on the slice, without the h_t factor.
OneStepResult solve_one_timestep(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
                                 const PdhgConfig& config);

/// Sequence of (iterations, N_t) solves performed by one strategy.
struct CostRun {
  std::string label;
  std::vector<std::pair<long, int>> solves;
};

struct CostRow {
  std::string label;
  long iterations = 0;
  long world_time = 0;
  /// Operation count divided by N: sum of iterations * (N_t + 1).
  long ops_per_n = 0;
};

CostRun cost_run(const std::string& label, const Solution& sol);
CostRun cost_run(const std::string& label, const RefinementResult& r);
CostRun cost_run(const std::string& label, const OneStepResult& r);

std::vector<CostRow> cost_report(const std::vector<CostRun>& runs);

}  // namespace pdcl
