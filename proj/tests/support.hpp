#pragma once

#include <cmath>
#include <random>

#include "pdcl/pdcl.hpp"

namespace pdcl::test {

/// Fixed-seed generator for the property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Field field(Layout layout, int nx, int levels, int first = 0) {
    Field f(layout, nx, levels, first);
    for (double& v : f.values()) v = uniform();
    return f;
  }
  Slice slice(std::size_t n) {
    Slice s(n);
    for (double& v : s) v = uniform();
    return s;
  }
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline SchemeConfig heat_scheme(TimeScheme t = TimeScheme::BackwardEuler) {
  return scheme_for(heat_problem(), t);
}

inline SchemeConfig transport_scheme(TimeScheme t = TimeScheme::BDF2, double alpha = 2.0) {
  return scheme_for(make_problem("transport-smooth", {{"alpha", alpha}}), t);
}

inline SchemeConfig traffic_scheme() { return scheme_for(traffic_problem()); }

}  // namespace pdcl::test
