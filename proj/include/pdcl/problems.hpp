#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdcl/grid.hpp"
#include "pdcl/operators.hpp"
#include "pdcl/preconditioner.hpp"

namespace pdcl {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// A named experiment. `params` holds every tunable number so the problem can
/// be rebuilt from its name alone (see make_problem).
struct ProblemSpec {
  std::string name;
  std::map<std::string, double> params;
  FluxSpec flux;
  Fn1 gamma;  // empty for inviscid problems
  Fn1 u0;
  double x_min = 0.0;
  double x_max = 1.0;
  double T = 1.0;
  TimeScheme time = TimeScheme::BackwardEuler;
  SpaceScheme space = SpaceScheme::FDHeat;
  KKind k_kind = KKind::LinearLaw;
  double k_coeff = 0.0;
};

/// gamma(x) = 0.5 + 0.1 sin(2 pi x), u0 = exp(-64 (x - 0.5)^2) on [0, 1], T = 0.1.
ProblemSpec heat_problem();
/// alpha = 2 on [0, 1]; sin(2 pi x) with T = 0.5, or the box 1 on [0.25, 0.75] with T = 0.25.
ProblemSpec transport_problem(bool smooth);
/// f(u) = -u^2 + u on [0, 2], u0 = 0.1 on [1, 2] and 0.25 elsewhere, T = 1.
ProblemSpec traffic_problem();
/// Constant state with zero flux; every scheme leaves it alone.
ProblemSpec zero_flux_problem(double value = 0.0);

/// Names: heat, transport-smooth, transport-discontinuous, traffic, zero-flux.
/// Overrides replace entries of the default parameter map; unknown keys throw.
ProblemSpec make_problem(const std::string& name, const std::map<std::string, double>& overrides = {});
std::vector<std::string> problem_names();

SchemeConfig scheme_for(const ProblemSpec& p, std::optional<TimeScheme> time = {},
                        std::optional<SpaceScheme> space = {});
SpaceTimeGrid grid_for(const ProblemSpec& p, int nx, int nt);

/// u0 at x - alpha t, wrapped into [x_min, x_min + length).
double analytic_transport(const Fn1& u0, double alpha, double x, double t, double x_min = 0.0,
                          double length = 1.0);

/// Space-time L2 distance between u (all levels) and ref sampled at the
/// field's points, weight h_t h_x per value.
double l2_error(const Field& u, const Fn2& ref, const SpaceTimeGrid& grid);

/// log2(e_k / e_{k+1}) for successive entries.
std::vector<double> convergence_order(const std::vector<double>& errors);

/// Position of value (j, d) of a slice in the given layout.
double point_of(const SpaceTimeGrid& grid, Layout layout, std::size_t index);

/// Cell averages of a DG slice (mean of the two quarter-point values).
std::vector<double> cell_means(std::span<const double> slice);

/// Undo the monotonicity shift: u(x, t) = v(x + s t, t), evaluated with the
/// piecewise linear DG reconstruction of v.
Field unshift(const Field& v, double s, const SpaceTimeGrid& grid);

}  // namespace pdcl
