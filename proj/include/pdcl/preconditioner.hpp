#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "pdcl/grid.hpp"
#include "pdcl/operators.hpp"

namespace pdcl {

enum class KKind { LinearLaw, NonlinearLaw };

/// Max of gamma over the FD half points.
double estimate_gamma_hat(const std::function<double(double)>& gamma, const SpaceTimeGrid& grid);

/// The G-prox metric K = K_t (x) I + I (x) (c^2 (-D_xx) + g^2 D_xx^2) on dual
/// fields with levels 0..N_t-1.
///
/// K_t = D D^T, where D is the time stencil restricted to the unknown slices
/// u^1..u^{N_t}. For backward Euler this is the second difference with a
/// Neumann end at t = 0 and a Dirichlet end after the last dual slice. D_xx
/// is the periodic second difference on the spatial values, which for DG are
/// the 2 N_x quarter points with spacing h_x / 2. K is positive definite.
class KOperator {
 public:
  KOperator(KKind kind, double coeff, double gamma_hat, const SpaceTimeGrid& grid, Layout layout,
            const TimeStencil& stencil);
  ~KOperator();
  KOperator(const KOperator&) = delete;
  KOperator& operator=(const KOperator&) = delete;
  KOperator(KOperator&&) noexcept;
  KOperator& operator=(KOperator&&) noexcept;

  KKind kind() const { return kind_; }
  double coeff() const { return coeff_; }
  double gamma_hat() const { return gamma_hat_; }
  const SpaceTimeGrid& grid() const { return grid_; }
  Layout layout() const { return layout_; }
  int points() const { return m_; }
  double spacing() const { return hs_; }
  int time_bandwidth() const { return p_; }

  /// Entry (r, s) of K_t, zero outside the band.
  double time_entry(int r, int s) const;
  /// Eigenvalue of c^2 (-D_xx) + g^2 D_xx^2 for the Fourier mode k.
  double space_symbol(int k) const;

  Field apply(const Field& v) const;
  /// FFT in space, banded Cholesky in time per Fourier mode.
  Field solve(const Field& rhs) const;

 private:
  void check(const Field& f) const;

  KKind kind_;
  double coeff_;
  double gamma_hat_;
  SpaceTimeGrid grid_;
  Layout layout_;
  int nt_;
  int m_;
  double hs_;
  int p_;
  std::vector<std::vector<double>> kt_;  // kt_[d][r] = K_t(r, r - d)
  int modes_;
  std::vector<double> chol_;  // per mode, nt_ rows of p_ + 1 band entries
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Coefficient conventions: LinearLaw takes alpha and gamma_hat, NonlinearLaw
/// takes c and ignores gamma_hat.
KOperator build_K(KKind kind, double coeff, double gamma_hat, const SpaceTimeGrid& grid, Layout layout,
                  const TimeStencil& stencil);

/// K for the scheme's own time stencil.
KOperator build_K(KKind kind, double coeff, double gamma_hat, const SpaceTimeOperator& op);

/// Sparse LDL^T solve of the assembled K; at most 10^4 unknowns.
Field solve_K_direct(const KOperator& K, const Field& rhs);

}  // namespace pdcl
