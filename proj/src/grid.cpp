#include "pdcl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pdcl {

SpaceTimeGrid make_grid(double x_min, double x_max, int nx, double T, int nt) {
  if (nx < 2) throw ArgumentError("grid: N_x must be at least 2");
  if (nt < 1) throw ArgumentError("grid: N_t must be at least 1");
  if (!(x_max > x_min)) throw ArgumentError("grid: x_max must exceed x_min");
  if (!(T > 0.0)) throw ArgumentError("grid: T must be positive");
  return SpaceTimeGrid{x_min, x_max, nx, T, nt};
}

std::string to_string(Layout layout) { return layout == Layout::FD ? "fd" : "dg2"; }

Field::Field(Layout layout, int nx, int levels, int first_level)
    : layout_(layout), nx_(nx), levels_(levels), first_(first_level) {
  if (nx < 1 || levels < 0) throw ArgumentError("field: bad shape");
  values_.assign(static_cast<std::size_t>(levels) * slice_size(), 0.0);
}

std::span<double> Field::slice(int l) {
  return {values_.data() + static_cast<std::size_t>(l - first_) * slice_size(), slice_size()};
}

std::span<const double> Field::slice(int l) const {
  return {values_.data() + static_cast<std::size_t>(l - first_) * slice_size(), slice_size()};
}

bool Field::same_shape(const Field& other) const {
  return layout_ == other.layout_ && nx_ == other.nx_ && levels_ == other.levels_ &&
         first_ == other.first_;
}

void Field::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

Slice project_initial(const std::function<double(double)>& u0, const SpaceTimeGrid& grid,
                      Layout layout) {
  Slice out(static_cast<std::size_t>(grid.nx) * dofs_per_cell(layout));
  for (int j = 0; j < grid.nx; ++j) {
    if (layout == Layout::FD) {
      out[j] = u0(grid.node(j));
    } else {
      out[2 * j] = u0(grid.dg_point(j, 0));
      out[2 * j + 1] = u0(grid.dg_point(j, 1));
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw ArgumentError("project_initial: initial condition is not finite");
  return out;
}

double spatial_weight(const SpaceTimeGrid& grid, Layout) { return grid.hx(); }

double inner_product(const Field& a, const Field& b, const SpaceTimeGrid& grid) {
  if (!a.same_shape(b)) throw ArgumentError("inner_product: layout or shape mismatch");
  double s = 0.0;
  const auto& x = a.values();
  const auto& y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return grid.ht() * spatial_weight(grid, a.layout()) * s;
}

double norm(const Field& a, const SpaceTimeGrid& grid) { return std::sqrt(inner_product(a, a, grid)); }

double slice_inner_product(std::span<const double> a, std::span<const double> b,
                           const SpaceTimeGrid& grid, Layout layout) {
  if (a.size() != b.size()) throw ArgumentError("slice_inner_product: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return spatial_weight(grid, layout) * s;
}

Field restrict_levels(const Field& f, int first, int last) {
  if (first < f.first_level() || last > f.last_level() || last < first)
    throw ArgumentError("restrict_levels: level range outside field");
  Field out(f.layout(), f.nx(), last - first + 1, first);
  for (int l = first; l <= last; ++l) {
    auto src = f.slice(l);
    std::copy(src.begin(), src.end(), out.slice(l).begin());
  }
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw ArgumentError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

std::optional<FieldIndex> find_non_finite(const Field& f) {
  const auto& v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      const auto per_level = f.slice_size();
      int l = static_cast<int>(i / per_level) + f.first_level();
      int rem = static_cast<int>(i % per_level);
      return FieldIndex{l, rem / f.dofs(), rem % f.dofs()};
    }
  }
  return std::nullopt;
}

}  // namespace pdcl
