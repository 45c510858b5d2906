#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdcl {

/// Raised for inconsistent sizes, layouts or parameters.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic mesh in x times a uniform mesh on [0, T].
struct SpaceTimeGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  int nx = 2;
  double T = 1.0;
  int nt = 1;

  double hx() const { return (x_max - x_min) / nx; }
  double ht() const { return T / nt; }
  double length() const { return x_max - x_min; }
  double t(int l) const { return l * ht(); }
  /// FD node x_j.
  double node(int j) const { return x_min + j * hx(); }
  /// Half point x_{j+1/2} of the FD mesh.
  double half_point(int j) const { return x_min + (j + 0.5) * hx(); }
  /// Quarter-point dof of DG cell j; d = 0 is the left point.
  double dg_point(int j, int d) const { return x_min + (j + 0.25 + 0.5 * d) * hx(); }

  bool operator==(const SpaceTimeGrid&) const = default;
};

SpaceTimeGrid make_grid(double x_min, double x_max, int nx, double T, int nt);

enum class Layout { FD, DG2 };

inline int dofs_per_cell(Layout layout) { return layout == Layout::FD ? 1 : 2; }
std::string to_string(Layout layout);

inline int wrap(int j, int n) {
  int r = j % n;
  return r < 0 ? r + n : r;
}

/// Space-time array stored slice by slice: (level, cell, dof) with dof fastest.
/// The first stored level is `first_level`, so residual fields indexed
/// l = 1..N_t can share the type with full trajectories.
class Field {
 public:
  Field() = default;
  Field(Layout layout, int nx, int levels, int first_level = 0);

  Layout layout() const { return layout_; }
  int nx() const { return nx_; }
  int levels() const { return levels_; }
  int first_level() const { return first_; }
  int last_level() const { return first_ + levels_ - 1; }
  int dofs() const { return dofs_per_cell(layout_); }
  std::size_t slice_size() const { return static_cast<std::size_t>(nx_) * dofs(); }
  std::size_t size() const { return values_.size(); }

  std::span<double> slice(int l);
  std::span<const double> slice(int l) const;

  double& operator()(int l, int j, int d = 0) { return values_[index(l, j, d)]; }
  double operator()(int l, int j, int d = 0) const { return values_[index(l, j, d)]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const Field& other) const;
  void set_zero();

 private:
  std::size_t index(int l, int j, int d) const {
    return (static_cast<std::size_t>(l - first_) * nx_ + j) * dofs() + d;
  }

  Layout layout_ = Layout::FD;
  int nx_ = 0;
  int levels_ = 0;
  int first_ = 0;
  std::vector<double> values_;
};

using Slice = std::vector<double>;

/// Samples u0 at the FD nodes or at the two DG quarter points of every cell.
Slice project_initial(const std::function<double(double)>& u0, const SpaceTimeGrid& grid,
                      Layout layout);

/// Quadrature weight of one spatial value; h_x for both layouts (see README).
double spatial_weight(const SpaceTimeGrid& grid, Layout layout);

/// h_t * w * sum over every stored value.
double inner_product(const Field& a, const Field& b, const SpaceTimeGrid& grid);
double norm(const Field& a, const SpaceTimeGrid& grid);

/// w * sum over one slice.
double slice_inner_product(std::span<const double> a, std::span<const double> b,
                           const SpaceTimeGrid& grid, Layout layout);

/// Copy of the levels first..last of f.
Field restrict_levels(const Field& f, int first, int last);

double max_abs(std::span<const double> v);
double max_abs_diff(const Field& a, const Field& b);

struct FieldIndex {
  int level, cell, dof;
};

/// First NaN or Inf entry, if any.
std::optional<FieldIndex> find_non_finite(const Field& f);

}  // namespace pdcl
