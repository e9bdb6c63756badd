#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdsym/field.hpp"

namespace rdsym {

/// Radial profile on the ladder r_j = A1 + j*dr, j = 0..n_r (a disk's j = 0
/// entry is the origin value).  Matches the radial restriction of PolarGrid.
struct RadialProfile {
  DomainSpec domain;
  int n_r = 0;
  std::vector<double> values;  // size n_r + 1

  double dr() const { return (domain.outer_radius - domain.inner_radius) / n_r; }
  double radius(int j) const { return domain.inner_radius + j * dr(); }

  double sup() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Lifts a radial profile onto a 2-D grid with the same n_r and domain.
inline ScalarField lift_radial(const GridPtr& grid, const RadialProfile& prof) {
  if (grid->n_r() != prof.n_r)
    throw std::invalid_argument("lift_radial: radial resolution mismatch");
  ScalarField out(grid);
  if (grid->has_origin()) out.v[grid->origin_index()] = prof.values[0];
  for (int j = grid->ring_first(); j <= grid->ring_last(); ++j)
    for (int k = 0; k < grid->n_theta(); ++k) out.v[grid->node_index(j, k)] = prof.values[j];
  return out;
}

namespace detail {

/// Tridiagonal bands of the radial -Laplacian on the interior ladder
/// (origin + rings 1..n_r-1 for a disk, rings 1..n_r-1 for an annulus),
/// matching the 2-D stencil restricted to angular mode zero.
struct RadialOperator {
  DomainSpec domain;
  int n_r = 0;
  bool origin = false;
  std::vector<double> sub, diag, sup;  // -Laplacian bands
  std::vector<double> weight;          // symmetrizing radial weights

  RadialOperator(DomainSpec dom, int n) : domain(dom), n_r(n), origin(dom.is_disk()) {
    if (n < 8) throw std::invalid_argument("RadialOperator: n_r must be >= 8");
    const double dr = (dom.outer_radius - dom.inner_radius) / n;
    const std::size_t m = static_cast<std::size_t>(n - 1) + (origin ? 1 : 0);
    sub.assign(m, 0.0);
    diag.assign(m, 0.0);
    sup.assign(m, 0.0);
    weight.assign(m, 0.0);
    std::size_t row = 0;
    if (origin) {
      diag[0] = 4.0 / (dr * dr);
      sup[0] = -4.0 / (dr * dr);
      weight[0] = dr / 8.0;  // pi*(dr/2)^2 relative to 2*pi*r*dr ring cells
      row = 1;
    }
    for (int j = 1; j <= n - 1; ++j, ++row) {
      const double r = dom.inner_radius + j * dr;
      const double clo = 1.0 / (dr * dr) - 1.0 / (2.0 * r * dr);
      const double cup = 1.0 / (dr * dr) + 1.0 / (2.0 * r * dr);
      diag[row] = 2.0 / (dr * dr);
      if (row > 0 && (j > 1 || origin)) sub[row] = -clo;
      if (j < n - 1) sup[row] = -cup;
      weight[row] = r;
    }
  }

  std::size_t size() const { return diag.size(); }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
      double acc = diag[i] * x[i];
      if (i > 0) acc += sub[i] * x[i - 1];
      if (i + 1 < m) acc += sup[i] * x[i + 1];
      y[i] = acc;
    }
  }

  double wdot(const std::vector<double>& a, const std::vector<double>& b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += weight[i] * a[i] * b[i];
    return acc;
  }

  /// Embeds interior unknowns into the full ladder with boundary zeros.
  RadialProfile to_profile(const std::vector<double>& x) const {
    RadialProfile p{domain, n_r, std::vector<double>(n_r + 1, 0.0)};
    std::size_t row = 0;
    if (origin) p.values[0] = x[row++];
    for (int j = 1; j <= n_r - 1; ++j) p.values[j] = x[row++];
    return p;
  }
};

/// Thomas solve of a general tridiagonal system; bands are copied so the
/// caller's operator stays intact.  Throws on a vanishing pivot.
inline void tridiag_solve(std::vector<double> sub, std::vector<double> diag,
                          std::vector<double> sup, std::vector<double>& d) {
  const std::size_t m = diag.size();
  for (std::size_t i = 1; i < m; ++i) {
    if (diag[i - 1] == 0.0) throw std::runtime_error("tridiag_solve: zero pivot");
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    d[i] -= w * d[i - 1];
  }
  if (diag[m - 1] == 0.0) throw std::runtime_error("tridiag_solve: zero pivot");
  d[m - 1] /= diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) d[i] = (d[i] - sup[i] * d[i + 1]) / diag[i];
}

}  // namespace detail

struct Eigenpair {
  double lambda = 0.0;
  RadialProfile phi;  // positive, sup-normalized to 1
  int iterations = 0;
};

/// Principal Dirichlet eigenpair of the Laplacian on B restricted to the
/// radial (angular mode zero) subspace, by inverse power iteration with
/// Rayleigh-quotient convergence to 1e-12 relative change.
inline Eigenpair principal_eigenpair(DomainSpec domain, int n_r) {
  const detail::RadialOperator A(domain, n_r);
  const std::size_t m = A.size();
  std::vector<double> z(m, 1.0), y(m);
  double lambda_prev = 0.0;
  const int cap = 100000;
  for (int it = 1; it <= cap; ++it) {
    std::vector<double> rhs = z;
    detail::tridiag_solve(A.sub, A.diag, A.sup, rhs);
    double sup = 0.0;
    for (double v : rhs) sup = std::max(sup, std::abs(v));
    if (sup == 0.0) throw std::runtime_error("principal_eigenpair: iteration collapsed");
    for (double& v : rhs) v /= sup;
    // Orient positive; the Perron mode has one sign.
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) mass += A.weight[i] * rhs[i];
    if (mass < 0.0)
      for (double& v : rhs) v = -v;
    z = std::move(rhs);
    A.apply(z, y);
    const double lambda = A.wdot(y, z) / A.wdot(z, z);
    if (it > 1 && std::abs(lambda - lambda_prev) <= 1e-12 * std::abs(lambda)) {
      Eigenpair out{lambda, A.to_profile(z), it};
      double sup_all = 0.0;
      for (double v : out.phi.values) sup_all = std::max(sup_all, std::abs(v));
      for (double& v : out.phi.values) v /= sup_all;
      return out;
    }
    lambda_prev = lambda;
  }
  throw std::runtime_error("principal_eigenpair: iteration cap reached");
}

/// Richardson-extrapolated lambda_1 from the n_r and n_r/2 ladders
/// (the plain discrete eigenvalue converges at O(h^2)).
inline double lambda1_extrapolated(DomainSpec domain, int n_r) {
  if (n_r % 2 != 0) throw std::invalid_argument("lambda1_extrapolated: n_r must be even");
  const double fine = principal_eigenpair(domain, n_r).lambda;
  const double coarse = principal_eigenpair(domain, n_r / 2).lambda;
  return (4.0 * fine - coarse) / 3.0;
}

/// Radial logistic steady state of -Lap z = a z - b z^2 with Dirichlet
/// boundary values (and the natural origin condition on a disk).
struct SteadyProfile {
  RadialProfile profile;
  double residual_sup = 0.0;
  bool positive = false;
  bool subcritical = false;  // a <= lambda_1, zero profile returned
  double lambda1 = 0.0;
  int newton_iterations = 0;
};

inline SteadyProfile radial_steady_state(double a, double b, DomainSpec domain, int n_r) {
  if (!(b > 0.0)) throw std::invalid_argument("radial_steady_state: b must be positive");
  const detail::RadialOperator A(domain, n_r);
  const Eigenpair eig = principal_eigenpair(domain, n_r);

  SteadyProfile out;
  out.lambda1 = eig.lambda;
  if (a <= eig.lambda) {
    out.profile = RadialProfile{domain, n_r, std::vector<double>(n_r + 1, 0.0)};
    out.subcritical = true;
    out.positive = true;
    return out;
  }

  const std::size_t m = A.size();
  auto gather = [&](const RadialProfile& p) {
    std::vector<double> x(m);
    std::size_t row = 0;
    if (A.origin) x[row++] = p.values[0];
    for (int j = 1; j <= n_r - 1; ++j) x[row++] = p.values[j];
    return x;
  };
  const std::vector<double> shape = gather(eig.phi);

  auto residual = [&](const std::vector<double>& z, std::vector<double>& F) {
    A.apply(z, F);  // F = -Lap z
    for (std::size_t i = 0; i < m; ++i) F[i] = -F[i] + a * z[i] - b * z[i] * z[i];
  };
  auto sup_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };

  const double scale = std::max(1.0, a * a / b);
  const double tol = 1e-11 * scale;
  const double amp0 = (a - eig.lambda) / b;
  std::vector<double> F(m), z;
  for (const double restart : {1.0, 0.5, 1.5, 0.25, 2.0}) {
    z.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) z[i] = restart * amp0 * shape[i];
    residual(z, F);
    double fnorm = sup_of(F);
    for (int it = 1; it <= 200; ++it) {
      if (fnorm <= tol) {
        out.profile = A.to_profile(z);
        out.residual_sup = fnorm;
        out.newton_iterations += it - 1;
        double mn = 0.0;
        for (double v : z) mn = std::min(mn, v);
        out.positive = mn >= -1e-10 * amp0;
        return out;
      }
      // Newton system: (-Lap + 2 b z - a) delta = F  =>  z += delta.
      std::vector<double> diag = A.diag, rhs = F;
      for (std::size_t i = 0; i < m; ++i) diag[i] += 2.0 * b * z[i] - a;
      detail::tridiag_solve(A.sub, diag, A.sup, rhs);
      double s = 1.0;
      std::vector<double> trial(m), Ft(m);
      double fnorm_trial = 0.0;
      while (true) {
        for (std::size_t i = 0; i < m; ++i) trial[i] = z[i] + s * rhs[i];
        residual(trial, Ft);
        fnorm_trial = sup_of(Ft);
        if (fnorm_trial <= (1.0 - 0.25 * s) * fnorm || s < 1.0 / 1024.0) break;
        s *= 0.5;
      }
      if (s < 1.0 / 1024.0 && fnorm_trial >= fnorm) {
        out.newton_iterations += it;
        break;  // stalled; fall through to the next restart amplitude
      }
      z.swap(trial);
      F.swap(Ft);
      fnorm = fnorm_trial;
    }
  }
  throw std::runtime_error("radial_steady_state: Newton failed after restarts");
}

}  // namespace rdsym
