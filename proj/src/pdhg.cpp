#include "pdcl/pdhg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace pdcl {

DivergenceError::DivergenceError(int it, const std::string& where)
    : std::runtime_error("diverged at iteration " + std::to_string(it) + ": non-finite value in " + where),
      iteration(it) {}

double PdhgConfig::effective_tau_u0() const {
  return tau_u0 ? *tau_u0 : std::min(tau_u, 0.5 / tau_lambda);
}

namespace {

double sum_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void check_finite(const Field& f, const char* name, int iteration) {
  if (auto bad = find_non_finite(f))
    throw DivergenceError(iteration, std::string(name) + " at (l=" + std::to_string(bad->level) +
                                         ", j=" + std::to_string(bad->cell) +
                                         ", d=" + std::to_string(bad->dof) + ")");
}

}  // namespace

std::pair<double, double> residual(const SpaceTimeOperator& op, const Field& u, const Field& phi,
                                   bool slice_norm) {
  const auto& g = op.grid();
  const double w = spatial_weight(g, op.layout()) * (slice_norm ? 1.0 : g.ht());
  Field r = op.apply_A(u);
  Field d = op.apply_AT(phi, u);
  return {std::sqrt(w * sum_squares(r.values())), std::sqrt(w * sum_squares(d.values()))};
}

PdhgSolver::PdhgSolver(const SpaceTimeOperator& op, const KOperator& K, PdhgConfig config, Slice u0)
    : op_(op), K_(K), config_(config), u0_(std::move(u0)) {
  if (u0_.size() != op_.slice_size()) throw ArgumentError("pdhg: initial slice has the wrong size");
  if (K_.layout() != op_.layout() || !(K_.grid() == op_.grid()))
    throw ArgumentError("pdhg: K does not match the scheme grid");
  if (!(config_.tau_u > 0 && config_.tau_phi > 0 && config_.tau_lambda > 0 && config_.effective_tau_u0() > 0))
    throw ArgumentError("pdhg: step sizes must be positive");
  if (!(config_.eps > 0)) throw ArgumentError("pdhg: eps must be positive");
  if (config_.max_iters < 0) throw ArgumentError("pdhg: max_iters must be nonnegative");
  res_ = op_.make_residual();
  dres_ = op_.make_dual_residual();
}

std::pair<double, double> PdhgSolver::record(PdhgState& s, const Field& primal_res) const {
  const auto& g = op_.grid();
  const double w = spatial_weight(g, op_.layout()) * (config_.slice_residual ? 1.0 : g.ht());
  op_.apply_AT(s.phi, s.u, dres_);
  ResidualRecord rec{s.n, std::sqrt(w * sum_squares(primal_res.values())),
                     std::sqrt(w * sum_squares(dres_.values()))};
  s.history.push_back(rec);
  return {rec.primal, rec.dual};
}

PdhgState PdhgSolver::initial_state() const {
  Field u = op_.make_primal();
  for (int l = 0; l <= op_.grid().nt; ++l) std::copy(u0_.begin(), u0_.end(), u.slice(l).begin());
  return warm_state(std::move(u), op_.make_dual(), Slice(u0_.size(), 0.0));
}

PdhgState PdhgSolver::warm_state(Field u, Field phi, Slice lambda) const {
  PdhgState s;
  s.u = std::move(u);
  s.phi = std::move(phi);
  s.phi_bar = s.phi;
  s.lambda = std::move(lambda);
  s.lambda_bar = s.lambda;
  if (!s.u.same_shape(op_.make_primal()) || !s.phi.same_shape(op_.make_dual()) ||
      s.lambda.size() != op_.slice_size())
    throw ArgumentError("pdhg: warm start has the wrong shape");
  op_.apply_A(s.u, res_);
  record(s, res_);
  return s;
}

void PdhgSolver::iterate(PdhgState& s) const {
  const int nt = op_.grid().nt;
  const std::size_t m = op_.slice_size();
  const double tu = config_.tau_u, tu0 = config_.effective_tau_u0();

  // Primal step with the extrapolated duals; the Jacobian is taken at u^{n-1}.
  op_.apply_AT(s.phi_bar, s.u, dres_);
  Slice a0(m);
  op_.apply_AT_initial(s.phi_bar, a0);
  for (int l = 1; l <= nt; ++l) {
    auto u = s.u.slice(l);
    auto d = dres_.slice(l);
    for (std::size_t i = 0; i < m; ++i) u[i] += tu * d[i];
  }
  auto u0 = s.u.slice(0);
  for (std::size_t i = 0; i < m; ++i) u0[i] += tu0 * (a0[i] - s.lambda_bar[i]);
  check_finite(s.u, "u", s.n + 1);

  // Dual step on the full residual of the new primal.
  op_.apply_A(s.u, res_);
  Field dz = K_.solve(res_);
  Field phi_old = s.phi;
  for (int l = 0; l < nt; ++l) {
    auto p = s.phi.slice(l);
    auto z = dz.slice(l);
    for (std::size_t i = 0; i < m; ++i) p[i] -= config_.tau_phi * z[i];
  }
  check_finite(s.phi, "phi", s.n + 1);

  Slice lambda_old = s.lambda;
  for (std::size_t i = 0; i < m; ++i) s.lambda[i] += config_.tau_lambda * (u0[i] - u0_[i]);

  auto& pb = s.phi_bar.values();
  const auto& pn = s.phi.values();
  const auto& po = phi_old.values();
  for (std::size_t i = 0; i < pb.size(); ++i) pb[i] = 2.0 * pn[i] - po[i];
  for (std::size_t i = 0; i < m; ++i) s.lambda_bar[i] = 2.0 * s.lambda[i] - lambda_old[i];

  ++s.n;
  record(s, res_);
}

Solution PdhgSolver::run(PdhgState s) const {
  bool converged = false;
  while (s.n < config_.max_iters) {
    iterate(s);
    const auto& r = s.history.back();
    if (r.primal <= config_.eps && r.dual <= config_.eps) {
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
  sol.grid = op_.grid();
  return sol;
}

KOperator problem_K(const ProblemSpec& p, const SpaceTimeOperator& op) {
  const double gh = p.gamma ? estimate_gamma_hat(p.gamma, op.grid()) : 0.0;
  return build_K(p.k_kind, p.k_coeff, gh, op);
}

Solution solve(const ProblemSpec& p, const SchemeConfig& scheme, const SpaceTimeGrid& grid,
               const PdhgConfig& config) {
  SpaceTimeOperator op(scheme, grid);
  KOperator K = problem_K(p, op);
  if (config.enforce_bound) {
    if (!scheme.linear()) throw StepSizeError("enforce_bound needs a linear flux");
    const double nu = estimate_nu_max(op, K);
    if (config.tau_u * config.tau_phi * nu >= 1.0)
      throw StepSizeError("tau_u * tau_phi * nu_max = " + std::to_string(config.tau_u * config.tau_phi * nu) +
                          " >= 1");
  }
  PdhgSolver solver(op, K, config, project_initial(p.u0, grid, scheme.layout()));
  return solver.run(solver.initial_state());
}

double power_iteration(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                       std::size_t n, double rel_tol, int max_iters) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> v(n), w(n);
  for (auto& x : v) x = dist(rng);
  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double y : x) s += y * y;
    s = std::sqrt(s);
    if (s > 0)
      for (double& y : x) y /= s;
    return s;
  };
  normalize(v);
  double rq = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    apply(v, w);
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
    const double nw = normalize(w);
    if (nw == 0.0) return 0.0;
    std::swap(v, w);
    if (it > 0 && std::abs(next - rq) <= rel_tol * std::abs(next)) return next;
    rq = next;
  }
  return rq;
}

namespace {

void check_linear(const SpaceTimeOperator& op) {
  if (!op.scheme().linear()) throw ArgumentError("spectral analysis needs a linear flux");
}

/// v (unknown slices) -> A^T K^-1 A v.
struct NormalOperator {
  const SpaceTimeOperator& op;
  const KOperator& K;
  mutable Field u, phi;
  NormalOperator(const SpaceTimeOperator& o, const KOperator& k)
      : op(o), K(k), u(o.make_primal()), phi(o.make_dual()) {}

  void operator()(const std::vector<double>& v, std::vector<double>& out) const {
    const std::size_t m = op.slice_size();
    std::fill(u.slice(0).begin(), u.slice(0).end(), 0.0);
    std::copy(v.begin(), v.end(), u.values().begin() + m);
    Field z = K.solve(op.apply_A(u));
    std::copy(z.values().begin(), z.values().end(), phi.values().begin());
    Field d = op.apply_AT(phi, u);
    std::copy(d.values().begin(), d.values().end(), out.begin());
  }
};

/// Dense matrix of K^-1 from unit right-hand sides.
Eigen::MatrixXd dense_K_inverse(const KOperator& K, const SpaceTimeOperator& op) {
  Field e = op.make_residual();
  const Eigen::Index n = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXd Ki(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    e.set_zero();
    e.values()[c] = 1.0;
    Field z = K.solve(e);
    for (Eigen::Index r = 0; r < n; ++r) Ki(r, c) = z.values()[r];
  }
  return 0.5 * (Ki + Ki.transpose());
}

/// Dense matrix of u (levels 0..N_t) -> A u.
Eigen::MatrixXd dense_A(const SpaceTimeOperator& op) {
  Field u = op.make_primal();
  const Eigen::Index n = static_cast<Eigen::Index>(u.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(op.make_residual().size());
  Eigen::MatrixXd A(rows, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    u.set_zero();
    u.values()[c] = 1.0;
    Field r = op.apply_A(u);
    for (Eigen::Index i = 0; i < rows; ++i) A(i, c) = r.values()[i];
  }
  return A;
}

}  // namespace

double estimate_nu_max(const SpaceTimeOperator& op, const KOperator& K, double rel_tol, int max_iters) {
  check_linear(op);
  NormalOperator N(op, K);
  const std::size_t n = op.slice_size() * op.grid().nt;
  return power_iteration([&](const std::vector<double>& v, std::vector<double>& w) { N(v, w); }, n, rel_tol,
                         max_iters);
}

std::vector<double> dense_nu_spectrum(const SpaceTimeOperator& op, const KOperator& K) {
  check_linear(op);
  const Eigen::Index m = static_cast<Eigen::Index>(op.slice_size());
  Eigen::MatrixXd A = dense_A(op);
  Eigen::MatrixXd Ai = A.rightCols(A.cols() - m);
  Eigen::MatrixXd G = Ai.transpose() * dense_K_inverse(K, op) * Ai;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> dense_mode_spectrum(const SpaceTimeOperator& op, const KOperator& K,
                                        const PdhgConfig& config) {
  check_linear(op);
  const auto& g = op.grid();
  const double w = spatial_weight(g, op.layout());
  const Eigen::Index m = static_cast<Eigen::Index>(op.slice_size());
  Eigen::MatrixXd A = dense_A(op);
  const Eigen::Index np = A.cols(), nd = A.rows();

  // B maps the primal (u^0..u^{N_t}) to the dual residuals (A u, -u^0).
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nd + m, np);
  B.topRows(nd) = A;
  B.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);

  // Dual metric times dual steps: h_t w tau_phi K^-1 on phi, w tau_lambda on lambda.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nd + m, nd + m);
  S.topLeftCorner(nd, nd) = g.ht() * w * config.tau_phi * dense_K_inverse(K, op);
  S.bottomRightCorner(m, m) = w * config.tau_lambda * Eigen::MatrixXd::Identity(m, m);

  // Primal steps over the primal metric: tau_u0 / w on u^0, tau_u / (h_t w) elsewhere.
  Eigen::VectorXd d(np);
  for (Eigen::Index i = 0; i < np; ++i)
    d(i) = std::sqrt(i < m ? config.effective_tau_u0() / w : config.tau_u / (g.ht() * w));
  Eigen::MatrixXd P = d.asDiagonal() * B.transpose() * S * B * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double mode_factor(double tau_product_nu) {
  if (tau_product_nu < 0.0 || tau_product_nu > 1.0) throw ArgumentError("mode_factor: needs 0 <= s <= 1");
  return std::sqrt(1.0 - tau_product_nu);
}

double observed_factor(const std::vector<ResidualRecord>& history) {
  if (history.size() < 20) throw ArgumentError("observed_factor: need at least 20 residual records");
  const std::size_t start = history.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = start; i < history.size(); ++i) {
    const double r = std::hypot(history[i].primal, history[i].dual);
    if (!(r > 0.0)) continue;
    const double x = history[i].iteration, y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw ArgumentError("observed_factor: residual history is zero");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

ContractionReport contraction_report(const SpaceTimeOperator& op, const KOperator& K,
                                     const PdhgConfig& config, const Solution& run) {
  ContractionReport rep;
  auto nu = dense_nu_spectrum(op, K);
  rep.nu_max = nu.back();
  auto s = dense_mode_spectrum(op, K, config);
  rep.s_min = s.front();
  rep.s_max = s.back();
  rep.predicted_factor = mode_factor(std::clamp(rep.s_min, 0.0, 1.0));
  rep.observed_factor = observed_factor(run.history);
  return rep;
}

}  // namespace pdcl
