#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdcl/grid.hpp"
#include "pdcl/operators.hpp"
#include "pdcl/preconditioner.hpp"
#include "pdcl/problems.hpp"

namespace pdcl {

/// A NaN or Inf appeared during the iteration.
struct DivergenceError : std::runtime_error {
  DivergenceError(int iteration, const std::string& where);
  int iteration;
};

/// The step sizes violate tau_u tau_phi nu_max < 1 while enforce_bound is on.
struct StepSizeError : ArgumentError {
  using ArgumentError::ArgumentError;
};

struct PdhgConfig {
  double tau_u = 0.8;
  double tau_phi = 0.8;
  double tau_lambda = 0.99;
  /// Step for the initial slice; defaults to min(tau_u, 0.5 / tau_lambda).
  std::optional<double> tau_u0;
  double eps = 1e-6;
  int max_iters = 10000;
  bool enforce_bound = false;
  /// Measure residuals in L2(Omega x {t}) instead of L2(Omega x [0, T]).
  bool slice_residual = false;

  double effective_tau_u0() const;
};

struct ResidualRecord {
  int iteration = 0;
  double primal = 0.0;
  double dual = 0.0;
};

struct PdhgState {
  Field u, phi, phi_bar;
  Slice lambda, lambda_bar;
  int n = 0;
  std::vector<ResidualRecord> history;
};

struct Solution {
  Field u, phi;
  Slice lambda;
  int iterations = 0;
  bool converged = false;
  std::vector<ResidualRecord> history;
  SpaceTimeGrid grid;
};

/// Residual pair (||A(u)||, ||A^T phi||) over the primal rows l = 0..N_t-1 and
/// the dual rows l = 1..N_t.
std::pair<double, double> residual(const SpaceTimeOperator& op, const Field& u, const Field& phi,
                                   bool slice_norm = false);

class PdhgSolver {
 public:
  PdhgSolver(const SpaceTimeOperator& op, const KOperator& K, PdhgConfig config, Slice u0);

  const PdhgConfig& config() const { return config_; }
  const Slice& u0() const { return u0_; }

  /// u = u0 on every level, phi = 0, lambda = 0; iteration-0 residual recorded.
  PdhgState initial_state() const;
  /// Wraps a warm start (u, phi, lambda) into a state with its residual recorded.
  PdhgState warm_state(Field u, Field phi, Slice lambda) const;

  /// One sweep: primal (Jacobian at the previous iterate), dual through K^-1,
  /// multiplier, extrapolation. Records the new residual.
  void iterate(PdhgState& s) const;

  /// Iterates until both residuals are <= eps (at least one sweep) or max_iters.
  Solution run(PdhgState s) const;

 private:
  std::pair<double, double> record(PdhgState& s, const Field& primal_res) const;

  const SpaceTimeOperator& op_;
  const KOperator& K_;
  PdhgConfig config_;
  Slice u0_;
  mutable Field res_, dres_;
};

/// K for a problem on an operator's grid and time stencil.
KOperator problem_K(const ProblemSpec& p, const SpaceTimeOperator& op);

/// Builds the operator, K and initial data for the problem and runs PDHG.
Solution solve(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
               const PdhgConfig& config);

/// Largest eigenvalue of v -> A^T K^-1 A v by power iteration, with v on the
/// unknown slices u^1..u^{N_t} (u^0 held at zero). Linear schemes only.
double estimate_nu_max(const SpaceTimeOperator& op, const KOperator& K, double rel_tol = 1e-10,
                       int max_iters = 20000);

/// Power iteration for a symmetric positive semidefinite operator on R^n.
double power_iteration(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                       std::size_t n, double rel_tol = 1e-10, int max_iters = 20000);

/// Dense spectrum of A^T K^-1 A on the unknown slices (small grids).
std::vector<double> dense_nu_spectrum(const SpaceTimeOperator& op, const KOperator& K);

/// Dense spectrum of the preconditioned saddle operator including the
/// initial slice and lambda. Each eigenvalue s yields an iteration mode of
/// modulus sqrt(1 - s).
std::vector<double> dense_mode_spectrum(const SpaceTimeOperator& op, const KOperator& K,
                                        const PdhgConfig& config);

struct ContractionReport {
  double nu_max = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double predicted_factor = 1.0;
  double observed_factor = 1.0;
};

/// sqrt(1 - tau_u tau_phi nu), the modulus of one iteration mode.
double mode_factor(double tau_product_nu);

/// Geometric-mean residual ratio over the tail half of the history, from a
/// least-squares fit of log(sqrt(primal^2 + dual^2)) against the iteration.
double observed_factor(const std::vector<ResidualRecord>& history);

ContractionReport contraction_report(const SpaceTimeOperator& op, const KOperator& K,
                                     const PdhgConfig& config, const Solution& run);

}  // namespace pdcl
