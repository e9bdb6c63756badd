#pragma once

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "rdsym/field.hpp"
#include "rdsym/operators.hpp"

namespace rdsym {

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Backward-Euler diffusion solve (I - dt*Lap_h) u = rhs with zero Dirichlet
/// rows, as conjugate gradients in the polar-area-weighted inner product
/// (the weights make the operator symmetric positive definite).  The
/// preconditioner diagonalizes the angular stencil by FFT and solves one
/// radial tridiagonal system per mode, which inverts the operator exactly,
/// so the loop certifies the 1e-10 residual in a single iteration.
class DiffusionSolver {
 public:
  static constexpr double kRelTol = 1e-10;

  DiffusionSolver(GridPtr grid, double dt) : grid_(std::move(grid)), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("DiffusionSolver: dt must be positive");
    const PolarGrid& g = *grid_;
    n_ = g.n_theta();
    n_half_ = n_ / 2 + 1;
    rings_ = g.n_r() - 1;  // interior rings 1..n_r-1
    build_factors();
    work_re_.assign(rings_ + 1, 0.0);
    work_im_.assign(rings_ + 1, 0.0);

    real_buf_ = fftw_alloc_real(static_cast<std::size_t>(rings_) * n_);
    cplx_buf_ = fftw_alloc_complex(static_cast<std::size_t>(rings_) * n_half_);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      const int dims[1] = {n_};
      fwd_ = fftw_plan_many_dft_r2c(1, dims, rings_, real_buf_, nullptr, 1, n_, cplx_buf_,
                                    nullptr, 1, n_half_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_many_dft_c2r(1, dims, rings_, cplx_buf_, nullptr, 1, n_half_, real_buf_,
                                    nullptr, 1, n_, FFTW_ESTIMATE);
    }
    if (!fwd_ || !bwd_) throw std::runtime_error("DiffusionSolver: FFTW planning failed");
  }

  ~DiffusionSolver() {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
  }

  DiffusionSolver(const DiffusionSolver&) = delete;
  DiffusionSolver& operator=(const DiffusionSolver&) = delete;

  double dt() const { return dt_; }
  const PolarGrid& grid() const { return *grid_; }

  /// (I - dt*Lap_h) x with x treated as zero on the Dirichlet boundary.
  ScalarField apply(const ScalarField& x) const {
    ScalarField xi = x;
    zero_boundary(xi);
    ScalarField lap = laplacian(xi);
    ScalarField out(x.grid, 0.0, x.time);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (grid_->is_interior(i)) out.v[i] = xi.v[i] - dt_ * lap.v[i];
    return out;
  }

  /// Solves into u; boundary nodes of u are exactly zero on return.
  /// Throws on iteration-cap exhaustion, reporting the residual.
  SolveStats solve(const ScalarField& rhs, ScalarField& u) {
    const PolarGrid& g = *grid_;
    if (rhs.grid.get() != &g) throw std::invalid_argument("DiffusionSolver: grid mismatch");
    u = ScalarField(rhs.grid, 0.0, rhs.time);

    ScalarField b = rhs;
    zero_boundary(b);
    const double bnorm = std::sqrt(wdot(b, b));
    // Denormal-scale right-hand sides (an extinct species) solve to zero.
    if (bnorm < 1e-280) return {0, 0.0};

    ScalarField r = b;
    ScalarField z(rhs.grid);
    precondition(r, z);
    ScalarField p = z;
    double rz = wdot(r, z);

    const std::size_t cap = 10 * g.node_count();
    SolveStats stats;
    for (std::size_t it = 1; it <= cap; ++it) {
      ScalarField Ap = apply(p);
      const double pAp = wdot(p, Ap);
      if (pAp <= 0.0) throw std::runtime_error("DiffusionSolver: operator lost definiteness");
      const double alpha = rz / pAp;
      for (std::size_t i = 0; i < u.size(); ++i) {
        u.v[i] += alpha * p.v[i];
        r.v[i] -= alpha * Ap.v[i];
      }
      const double rnorm = std::sqrt(wdot(r, r));
      stats.iterations = static_cast<int>(it);
      stats.relative_residual = rnorm / bnorm;
      if (stats.relative_residual <= kRelTol) {
        zero_boundary(u);
        return stats;
      }
      precondition(r, z);
      const double rz_new = wdot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < p.size(); ++i) p.v[i] = z.v[i] + beta * p.v[i];
    }
    throw std::runtime_error("DiffusionSolver: CG iteration cap reached, relative residual " +
                             std::to_string(stats.relative_residual));
  }

 private:
  struct Tridiag {
    // Precomputed Thomas factors: forward multipliers and pivots.
    std::vector<double> sub, diag, sup;   // matrix bands
    std::vector<double> w, inv_piv;       // factorization

    void factor() {
      const std::size_t m = diag.size();
      w.assign(m, 0.0);
      inv_piv.assign(m, 0.0);
      double piv = diag[0];
      inv_piv[0] = 1.0 / piv;
      for (std::size_t i = 1; i < m; ++i) {
        w[i] = sub[i] * inv_piv[i - 1];
        piv = diag[i] - w[i] * sup[i - 1];
        inv_piv[i] = 1.0 / piv;
      }
    }

    template <typename T>
    void solve(T* d) const {
      const std::size_t m = diag.size();
      for (std::size_t i = 1; i < m; ++i) d[i] -= w[i] * d[i - 1];
      d[m - 1] *= inv_piv[m - 1];
      for (std::size_t i = m - 1; i-- > 0;) d[i] = (d[i] - sup[i] * d[i + 1]) * inv_piv[i];
    }
  };

  void build_factors() {
    const PolarGrid& g = *grid_;
    const double dr = g.dr();
    const double dphi = g.dphi();
    const double inv_dr2 = 1.0 / (dr * dr);
    modes_.resize(n_half_);
    const bool origin = g.has_origin();
    for (int m = 0; m < n_half_; ++m) {
      const double mu = 4.0 * std::pow(std::sin(0.5 * m * dphi), 2) / (dphi * dphi);
      Tridiag& T = modes_[m];
      const bool with_origin = origin && m == 0;
      const std::size_t size = rings_ + (with_origin ? 1 : 0);
      T.sub.assign(size, 0.0);
      T.diag.assign(size, 0.0);
      T.sup.assign(size, 0.0);
      std::size_t row = 0;
      if (with_origin) {
        const double r1 = g.ring_radius(1);
        T.diag[0] = 1.0 + dt_ * 4.0 / (r1 * r1);
        T.sup[0] = -dt_ * 4.0 / (r1 * r1);
        row = 1;
      }
      for (int j = 1; j <= g.n_r() - 1; ++j, ++row) {
        const double r = g.ring_radius(j);
        const double clo = inv_dr2 - 1.0 / (2.0 * r * dr);
        const double cup = inv_dr2 + 1.0 / (2.0 * r * dr);
        T.diag[row] = 1.0 + dt_ * (2.0 * inv_dr2 + mu / (r * r));
        if (row > 0 && (j > 1 || with_origin)) T.sub[row] = -dt_ * clo;
        if (j < g.n_r() - 1) T.sup[row] = -dt_ * cup;
        // Couplings into Dirichlet rings (outer always, inner for annuli,
        // and the origin for m > 0 on a disk) drop out of the system.
        if (j == 1 && origin && !with_origin) T.sub[row] = 0.0;
        if (j == 1 && !origin) T.sub[row] = 0.0;
      }
      T.factor();
    }
  }

  void zero_boundary(ScalarField& f) const {
    const PolarGrid& g = *grid_;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (g.is_boundary(i)) f.v[i] = 0.0;
  }

  double wdot(const ScalarField& a, const ScalarField& b) const {
    const PolarGrid& g = *grid_;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (g.is_interior(i)) acc += g.weight(i) * a.v[i] * b.v[i];
    return acc;
  }

  /// Exact inverse of (I - dt*Lap_h): angular FFT, one tridiagonal solve
  /// per mode, inverse FFT.
  void precondition(const ScalarField& rhs, ScalarField& out) {
    const PolarGrid& g = *grid_;
    for (int j = 1; j <= g.n_r() - 1; ++j) {
      const std::size_t src = g.node_index(j, 0);
      double* dst = real_buf_ + static_cast<std::size_t>(j - 1) * n_;
      for (int k = 0; k < n_; ++k) dst[k] = rhs.v[src + k];
    }
    fftw_execute(fwd_);

    const bool origin = g.has_origin();
    double u0 = 0.0;
    for (int m = 0; m < n_half_; ++m) {
      const Tridiag& T = modes_[m];
      if (origin && m == 0) {
        // Solve in ring means so the radial system keeps its M-matrix form.
        work_re_[0] = rhs.v[g.origin_index()];
        for (int j = 0; j < rings_; ++j) work_re_[j + 1] = cplx_buf_[j * n_half_][0] / n_;
        T.solve(work_re_.data());
        u0 = work_re_[0];
        for (int j = 0; j < rings_; ++j) {
          cplx_buf_[j * n_half_][0] = work_re_[j + 1] * n_;
          cplx_buf_[j * n_half_][1] = 0.0;
        }
      } else {
        for (int j = 0; j < rings_; ++j) {
          work_re_[j] = cplx_buf_[j * n_half_ + m][0];
          work_im_[j] = cplx_buf_[j * n_half_ + m][1];
        }
        T.solve(work_re_.data());
        T.solve(work_im_.data());
        for (int j = 0; j < rings_; ++j) {
          cplx_buf_[j * n_half_ + m][0] = work_re_[j];
          cplx_buf_[j * n_half_ + m][1] = work_im_[j];
        }
      }
    }

    fftw_execute(bwd_);
    out = ScalarField(rhs.grid, 0.0, rhs.time);
    if (origin) out.v[g.origin_index()] = u0;
    const double scale = 1.0 / n_;
    for (int j = 1; j <= g.n_r() - 1; ++j) {
      const std::size_t dst = g.node_index(j, 0);
      const double* src = real_buf_ + static_cast<std::size_t>(j - 1) * n_;
      for (int k = 0; k < n_; ++k) out.v[dst + k] = src[k] * scale;
    }
  }

  GridPtr grid_;
  double dt_;
  int n_ = 0;
  int n_half_ = 0;
  int rings_ = 0;
  std::vector<Tridiag> modes_;
  std::vector<double> work_re_, work_im_;
  double* real_buf_ = nullptr;
  fftw_complex* cplx_buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace rdsym
