#include "pdcl/problems.hpp"

#include <cmath>
#include <numbers>

namespace pdcl {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) { return p.at(key); }

std::map<std::string, double> merged(std::map<std::string, double> defaults, const std::string& name,
                                     const std::map<std::string, double>& overrides) {
  for (const auto& [k, v] : overrides) {
    auto it = defaults.find(k);
    if (it == defaults.end()) throw ArgumentError("problem '" + name + "' has no parameter '" + k + "'");
    it->second = v;
  }
  return defaults;
}

ProblemSpec build_heat(const std::map<std::string, double>& p) {
  ProblemSpec s;
  s.name = "heat";
  s.params = p;
  const double g0 = param(p, "gamma0"), g1 = param(p, "gamma1");
  const double width = param(p, "width"), centre = param(p, "center");
  s.flux = FluxSpec::linear(0.0);
  s.gamma = [g0, g1](double x) { return g0 + g1 * std::sin(2.0 * std::numbers::pi * x); };
  s.u0 = [width, centre](double x) { return std::exp(-width * (x - centre) * (x - centre)); };
  s.x_min = 0.0;
  s.x_max = 1.0;
  s.T = param(p, "T");
  s.time = TimeScheme::BackwardEuler;
  s.space = SpaceScheme::FDHeat;
  s.k_kind = KKind::LinearLaw;
  s.k_coeff = 0.0;
  return s;
}

ProblemSpec build_transport(bool smooth, const std::map<std::string, double>& p) {
  ProblemSpec s;
  s.name = smooth ? "transport-smooth" : "transport-discontinuous";
  s.params = p;
  const double a = param(p, "alpha");
  s.flux = FluxSpec::linear(a);
  if (smooth) {
    s.u0 = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
  } else {
    const double lo = param(p, "left"), hi = param(p, "right");
    s.u0 = [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; };
  }
  s.x_min = 0.0;
  s.x_max = 1.0;
  s.T = param(p, "T");
  s.time = TimeScheme::BDF2;
  s.space = SpaceScheme::DGLinear;
  s.k_kind = KKind::LinearLaw;
  s.k_coeff = a;
  return s;
}

ProblemSpec build_traffic(const std::map<std::string, double>& p) {
  ProblemSpec s;
  s.name = "traffic";
  s.params = p;
  s.flux = FluxSpec::quadratic(param(p, "alpha"), param(p, "beta"));
  const double lo = param(p, "u_low"), hi = param(p, "u_high");
  s.u0 = [lo, hi](double x) { return (x >= 1.0 && x <= 2.0) ? lo : hi; };
  s.x_min = 0.0;
  s.x_max = 2.0;
  s.T = param(p, "T");
  s.time = TimeScheme::BackwardEuler;
  s.space = SpaceScheme::DGQuadratic;
  s.k_kind = KKind::NonlinearLaw;
  s.k_coeff = param(p, "c");
  return s;
}

ProblemSpec build_zero(const std::map<std::string, double>& p) {
  ProblemSpec s;
  s.name = "zero-flux";
  s.params = p;
  const double v = param(p, "value");
  s.flux = FluxSpec::linear(0.0);
  s.u0 = [v](double) { return v; };
  s.T = param(p, "T");
  s.time = TimeScheme::BackwardEuler;
  s.space = SpaceScheme::DGLinear;
  s.k_kind = KKind::LinearLaw;
  s.k_coeff = 0.0;
  return s;
}

const std::map<std::string, double> kHeat{{"gamma0", 0.5}, {"gamma1", 0.1}, {"width", 64.0},
                                          {"center", 0.5}, {"T", 0.1}};
const std::map<std::string, double> kSmooth{{"alpha", 2.0}, {"T", 0.5}};
const std::map<std::string, double> kBox{{"alpha", 2.0}, {"T", 0.25}, {"left", 0.25}, {"right", 0.75}};
const std::map<std::string, double> kTraffic{{"alpha", -1.0}, {"beta", 1.0}, {"u_low", 0.1},
                                             {"u_high", 0.25}, {"T", 1.0}, {"c", 1.0}};
const std::map<std::string, double> kZero{{"value", 0.0}, {"T", 1.0}};

}  // namespace

ProblemSpec heat_problem() { return build_heat(kHeat); }
ProblemSpec transport_problem(bool smooth) { return build_transport(smooth, smooth ? kSmooth : kBox); }
ProblemSpec traffic_problem() { return build_traffic(kTraffic); }
ProblemSpec zero_flux_problem(double value) { return make_problem("zero-flux", {{"value", value}}); }

ProblemSpec make_problem(const std::string& name, const std::map<std::string, double>& overrides) {
  if (name == "heat") return build_heat(merged(kHeat, name, overrides));
  if (name == "transport-smooth") return build_transport(true, merged(kSmooth, name, overrides));
  if (name == "transport-discontinuous") return build_transport(false, merged(kBox, name, overrides));
  if (name == "traffic") return build_traffic(merged(kTraffic, name, overrides));
  if (name == "zero-flux") return build_zero(merged(kZero, name, overrides));
  throw ArgumentError("unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
  return {"heat", "transport-smooth", "transport-discontinuous", "traffic", "zero-flux"};
}

SchemeConfig scheme_for(const ProblemSpec& p, std::optional<TimeScheme> time, std::optional<SpaceScheme> space) {
  SchemeConfig s;
  s.time = time.value_or(p.time);
  s.space = space.value_or(p.space);
  s.flux = p.flux;
  s.gamma = p.gamma;
  return s;
}

SpaceTimeGrid grid_for(const ProblemSpec& p, int nx, int nt) { return make_grid(p.x_min, p.x_max, nx, p.T, nt); }

double analytic_transport(const Fn1& u0, double alpha, double x, double t, double x_min, double length) {
  double y = std::fmod(x - alpha * t - x_min, length);
  if (y < 0) y += length;
  return u0(x_min + y);
}

double point_of(const SpaceTimeGrid& grid, Layout layout, std::size_t index) {
  const int j = static_cast<int>(index / dofs_per_cell(layout));
  return layout == Layout::FD ? grid.node(j) : grid.dg_point(j, static_cast<int>(index % 2));
}

double l2_error(const Field& u, const Fn2& ref, const SpaceTimeGrid& grid) {
  double s = 0.0;
  for (int l = u.first_level(); l <= u.last_level(); ++l) {
    auto v = u.slice(l);
    const double t = grid.t(l);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double e = v[i] - ref(point_of(grid, u.layout(), i), t);
      s += e * e;
    }
  }
  return std::sqrt(grid.ht() * spatial_weight(grid, u.layout()) * s);
}

std::vector<double> convergence_order(const std::vector<double>& errors) {
  if (errors.size() < 2) throw ArgumentError("convergence_order: need at least two errors");
  for (double e : errors)
    if (!(e > 0.0)) throw ArgumentError("convergence_order: errors must be positive");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

std::vector<double> cell_means(std::span<const double> slice) {
  std::vector<double> out(slice.size() / 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.5 * (slice[2 * j] + slice[2 * j + 1]);
  return out;
}

Field unshift(const Field& v, double s, const SpaceTimeGrid& grid) {
  if (v.layout() != Layout::DG2) throw ArgumentError("unshift: DG field expected");
  Field out = v;
  if (s == 0.0) return out;
  const double h = grid.hx(), L = grid.length();
  for (int l = v.first_level(); l <= v.last_level(); ++l) {
    auto src = v.slice(l);
    auto dst = out.slice(l);
    for (int j = 0; j < grid.nx; ++j)
      for (int d = 0; d < 2; ++d) {
        double y = std::fmod(grid.dg_point(j, d) + s * grid.t(l) - grid.x_min, L);
        if (y < 0) y += L;
        const int c = std::min(static_cast<int>(y / h), grid.nx - 1);
        // Linear through the quarter points: value at xi in [0, 1] of the cell.
        const double xi = y / h - c;
        const double a = src[2 * c], b = src[2 * c + 1];
        dst[2 * j + d] = a + (b - a) * (xi - 0.25) / 0.5;
      }
  }
  return out;
}

}  // namespace pdcl
