#include "pdcl/preconditioner.hpp"

#include <fftw3.h>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>

namespace pdcl {

double estimate_gamma_hat(const std::function<double(double)>& gamma, const SpaceTimeGrid& grid) {
  double g = 0.0;
  for (int j = 0; j < grid.nx; ++j) g = std::max(g, gamma(grid.half_point(j)));
  return g;
}

struct KOperator::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

struct RealBuf {
  double* p;
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuf() { fftw_free(p); }
};

struct ComplexBuf {
  fftw_complex* p;
  explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuf() { fftw_free(p); }
};

}  // namespace

KOperator::KOperator(KKind kind, double coeff, double gamma_hat, const SpaceTimeGrid& grid, Layout layout,
                     const TimeStencil& stencil)
    : kind_(kind),
      coeff_(coeff),
      gamma_hat_(kind == KKind::LinearLaw ? gamma_hat : 0.0),
      grid_(grid),
      layout_(layout),
      nt_(grid.nt),
      m_(grid.nx * dofs_per_cell(layout)),
      hs_(grid.hx() / dofs_per_cell(layout)),
      p_(stencil.bandwidth()),
      modes_(m_ / 2 + 1) {
  if (gamma_hat < 0.0) throw ArgumentError("build_K: gamma_hat must be nonnegative");
  if (stencil.nt() != nt_) throw ArgumentError("build_K: stencil and grid disagree on N_t");

  // K_t(r, s) = sum over unknown levels l = 1..N_t of T[r][l] T[s][l].
  kt_.assign(p_ + 1, std::vector<double>(nt_, 0.0));
  for (int d = 0; d <= p_; ++d)
    for (int r = d; r < nt_; ++r) {
      double s = 0.0;
      for (int l = std::max(1, r - 1); l <= std::min(nt_, r + 1); ++l)
        s += stencil.coef(r, l) * stencil.coef(r - d, l);
      kt_[d][r] = s;
    }

  // Banded Cholesky of K_t + s_k I for every Fourier mode; L(r, r - d) at
  // chol_[(k * nt + r) * (p + 1) + d].
  const int w = p_ + 1;
  chol_.assign(static_cast<std::size_t>(modes_) * nt_ * w, 0.0);
  for (int k = 0; k < modes_; ++k) {
    double* L = chol_.data() + static_cast<std::size_t>(k) * nt_ * w;
    const double shift = space_symbol(k);
    for (int r = 0; r < nt_; ++r) {
      for (int d = p_; d >= 0; --d) {
        const int c = r - d;
        if (c < 0) continue;
        double s = kt_[d][r] + (d == 0 ? shift : 0.0);
        for (int e = 1; e <= p_; ++e) {
          // sum over columns q < c of L(r, q) L(c, q)
          const int q = c - e;
          if (q < 0 || r - q > p_) continue;
          s -= L[r * w + (r - q)] * L[c * w + e];
        }
        if (d == 0) {
          if (!(s > 0.0)) throw ArgumentError("build_K: time block is not positive definite");
          L[r * w] = std::sqrt(s);
        } else {
          L[r * w + d] = s / L[c * w];
        }
      }
    }
  }

  plans_ = std::make_unique<Plans>();
  RealBuf re(static_cast<std::size_t>(nt_) * m_);
  ComplexBuf co(static_cast<std::size_t>(nt_) * modes_);
  int n[1] = {m_};
  plans_->forward = fftw_plan_many_dft_r2c(1, n, nt_, re.p, nullptr, 1, m_, co.p, nullptr, 1, modes_,
                                           FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_dft_c2r(1, n, nt_, co.p, nullptr, 1, modes_, re.p, nullptr, 1, m_,
                                            FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw ArgumentError("build_K: FFTW planning failed");
}

KOperator::~KOperator() = default;
KOperator::KOperator(KOperator&&) noexcept = default;
KOperator& KOperator::operator=(KOperator&&) noexcept = default;

double KOperator::time_entry(int r, int s) const {
  if (r < s) std::swap(r, s);
  const int d = r - s;
  if (d > p_ || r >= nt_ || s < 0) return 0.0;
  return kt_[d][r];
}

double KOperator::space_symbol(int k) const {
  const double mu = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / m_)) / (hs_ * hs_);
  return coeff_ * coeff_ * mu + gamma_hat_ * gamma_hat_ * mu * mu;
}

void KOperator::check(const Field& f) const {
  if (f.layout() != layout_ || f.nx() != grid_.nx || f.first_level() != 0 || f.levels() != nt_)
    throw ArgumentError("K: field shape does not match the operator");
}

Field KOperator::apply(const Field& v) const {
  check(v);
  Field out(layout_, grid_.nx, nt_, 0);
  const double inv = 1.0 / (hs_ * hs_);
  const double c2 = coeff_ * coeff_, g2 = gamma_hat_ * gamma_hat_;
  std::vector<double> dxx(m_);
  for (int r = 0; r < nt_; ++r) {
    auto o = out.slice(r);
    for (int s = std::max(0, r - p_); s <= std::min(nt_ - 1, r + p_); ++s) {
      const double c = time_entry(r, s);
      auto vs = v.slice(s);
      for (int i = 0; i < m_; ++i) o[i] += c * vs[i];
    }
    auto vr = v.slice(r);
    for (int i = 0; i < m_; ++i)
      dxx[i] = inv * (vr[wrap(i + 1, m_)] - 2.0 * vr[i] + vr[wrap(i - 1, m_)]);
    for (int i = 0; i < m_; ++i) {
      const double d4 = inv * (dxx[wrap(i + 1, m_)] - 2.0 * dxx[i] + dxx[wrap(i - 1, m_)]);
      o[i] += -c2 * dxx[i] + g2 * d4;
    }
  }
  return out;
}

Field KOperator::solve(const Field& rhs) const {
  check(rhs);
  RealBuf re(static_cast<std::size_t>(nt_) * m_);
  ComplexBuf co(static_cast<std::size_t>(nt_) * modes_);
  std::copy(rhs.values().begin(), rhs.values().end(), re.p);
  fftw_execute_dft_r2c(plans_->forward, re.p, co.p);

  const int w = p_ + 1;
  std::vector<std::complex<double>> z(nt_);
  for (int k = 0; k < modes_; ++k) {
    const double* L = chol_.data() + static_cast<std::size_t>(k) * nt_ * w;
    for (int r = 0; r < nt_; ++r) {
      const auto& c = co.p[static_cast<std::size_t>(r) * modes_ + k];
      z[r] = {c[0], c[1]};
    }
    for (int r = 0; r < nt_; ++r) {
      std::complex<double> s = z[r];
      for (int d = 1; d <= p_ && r - d >= 0; ++d) s -= L[r * w + d] * z[r - d];
      z[r] = s / L[r * w];
    }
    for (int r = nt_ - 1; r >= 0; --r) {
      std::complex<double> s = z[r];
      for (int d = 1; d <= p_ && r + d < nt_; ++d) s -= L[(r + d) * w + d] * z[r + d];
      z[r] = s / L[r * w];
    }
    for (int r = 0; r < nt_; ++r) {
      auto& c = co.p[static_cast<std::size_t>(r) * modes_ + k];
      c[0] = z[r].real();
      c[1] = z[r].imag();
    }
  }

  fftw_execute_dft_c2r(plans_->backward, co.p, re.p);
  Field out(layout_, grid_.nx, nt_, 0);
  const double scale = 1.0 / m_;
  auto& v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * re.p[i];
  return out;
}

KOperator build_K(KKind kind, double coeff, double gamma_hat, const SpaceTimeGrid& grid, Layout layout,
                  const TimeStencil& stencil) {
  return KOperator(kind, coeff, gamma_hat, grid, layout, stencil);
}

KOperator build_K(KKind kind, double coeff, double gamma_hat, const SpaceTimeOperator& op) {
  return KOperator(kind, coeff, gamma_hat, op.grid(), op.layout(), op.stencil());
}

Field solve_K_direct(const KOperator& K, const Field& rhs) {
  const SpaceTimeGrid& g = K.grid();
  const int nt = g.nt;
  const int m = K.points();
  const long n = static_cast<long>(nt) * m;
  if (n > 10000) throw ArgumentError("solve_K_direct: more than 10^4 unknowns");
  if (rhs.layout() != K.layout() || rhs.nx() != g.nx || rhs.levels() != nt)
    throw ArgumentError("solve_K_direct: field shape does not match the operator");

  // Assembled from the stencils: time block from K_t, space block from the
  // periodic second difference and its square.
  using Sp = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> tt, tx;
  for (int r = 0; r < nt; ++r)
    for (int s = 0; s < nt; ++s)
      if (double c = K.time_entry(r, s); c != 0.0) tt.emplace_back(r, s, c);
  const double inv = 1.0 / (K.spacing() * K.spacing());
  for (int i = 0; i < m; ++i) {
    tx.emplace_back(i, i, -2.0 * inv);
    tx.emplace_back(i, wrap(i + 1, m), inv);
    tx.emplace_back(i, wrap(i - 1, m), inv);
  }
  Sp Kt(nt, nt), Dxx(m, m);
  Kt.setFromTriplets(tt.begin(), tt.end());
  Dxx.setFromTriplets(tx.begin(), tx.end());
  Sp It(nt, nt), Ix(m, m);
  It.setIdentity();
  Ix.setIdentity();
  Sp Sx = -K.coeff() * K.coeff() * Dxx + K.gamma_hat() * K.gamma_hat() * (Dxx * Dxx);

  auto kron = [](const Sp& a, const Sp& b) {
    std::vector<Eigen::Triplet<double>> t;
    for (int ka = 0; ka < a.outerSize(); ++ka)
      for (Sp::InnerIterator ia(a, ka); ia; ++ia)
        for (int kb = 0; kb < b.outerSize(); ++kb)
          for (Sp::InnerIterator ib(b, kb); ib; ++ib)
            t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                           ia.value() * ib.value());
    Sp out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  Sp A = kron(Kt, Ix) + kron(It, Sx);
  Eigen::SimplicialLDLT<Sp> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw ArgumentError("solve_K_direct: factorization failed");
  Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), n);
  Eigen::VectorXd x = ldlt.solve(b);
  Field out(K.layout(), g.nx, nt, 0);
  std::copy(x.data(), x.data() + n, out.values().begin());
  return out;
}

}  // namespace pdcl
