#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "rdsym/field.hpp"

namespace rdsym {

namespace detail {

/// Lagrange cubic through values at integer offsets 0..3, evaluated at s.
inline double lagrange4(const std::array<double, 4>& f, double s) {
  const double l0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double l1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double l2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double l3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3];
}

/// Periodic cubic interpolation along one ring at angle phi.
inline double ring_interp(const ScalarField& f, int ring, double phi) {
  const PolarGrid& g = *f.grid;
  const int n = g.n_theta();
  double kr = phi / g.dphi();
  kr = std::fmod(kr, static_cast<double>(n));
  if (kr < 0) kr += n;
  const int k0 = static_cast<int>(kr);
  const double t = kr - k0;
  const std::size_t base = g.node_index(ring, 0);
  auto at = [&](int k) { return f.v[base + ((k % n) + n) % n]; };
  return lagrange4({at(k0 - 1), at(k0), at(k0 + 1), at(k0 + 2)}, t + 1.0);
}

}  // namespace detail

/// Cubic tensor interpolation of a grid field at an arbitrary point of the
/// closed domain.  A disk treats the origin node as the r = 0 ring.
inline double interpolate(const ScalarField& f, Point p) {
  const PolarGrid& g = *f.grid;
  const DomainSpec& dom = g.domain();
  double r = p.norm();
  const double reach_tol = 1e-12 * dom.outer_radius;
  if (r > dom.outer_radius + reach_tol || r < dom.inner_radius - reach_tol)
    throw std::invalid_argument("interpolate: point outside the domain");
  r = std::clamp(r, dom.inner_radius, dom.outer_radius);
  const double phi = std::atan2(p.y, p.x);

  // Radial pseudo-rings: m = 0..n_r, with m = 0 the origin on a disk.
  const int m_max = g.n_r();
  const double rr = (r - dom.inner_radius) / g.dr();
  int m0 = static_cast<int>(std::floor(rr)) - 1;
  m0 = std::clamp(m0, 0, m_max - 3);
  const double s = rr - m0;

  std::array<double, 4> vals{};
  for (int q = 0; q < 4; ++q) {
    const int m = m0 + q;
    if (g.has_origin() && m == 0)
      vals[q] = f.v[g.origin_index()];
    else
      vals[q] = detail::ring_interp(f, m, phi);
  }
  return detail::lagrange4(vals, s);
}

struct DirectionalSecondDerivative {
  double value = 0.0;
  double rho = 0.0;  // sampling spacing actually used
};

/// One-sided second derivative of f at x0 along the unit vector d, from
/// interpolated samples at 0, rho, 2*rho, 3*rho.  The 4-point stencil is
/// exact for cubics along the ray.  rho defaults to twice the local grid
/// spacing and is reported back for convergence checks.
inline DirectionalSecondDerivative directional_second_derivative(const ScalarField& f,
                                                                 Point x0, Point d,
                                                                 double rho = 0.0) {
  const PolarGrid& g = *f.grid;
  if (rho <= 0.0) {
    const double h_loc = std::max(g.dr(), x0.norm() * g.dphi());
    rho = 2.0 * h_loc;
  }
  const DomainSpec& dom = g.domain();
  const double reach_tol = 1e-12 * dom.outer_radius;
  for (int i = 1; i <= 3; ++i) {
    const Point p = x0 + (i * rho) * d;
    const double r = p.norm();
    if (r > dom.outer_radius + reach_tol || r < dom.inner_radius - reach_tol)
      throw std::invalid_argument("directional_second_derivative: insufficient stencil reach");
  }
  const double g0 = interpolate(f, x0);
  const double g1 = interpolate(f, x0 + rho * d);
  const double g2 = interpolate(f, x0 + (2.0 * rho) * d);
  const double g3 = interpolate(f, x0 + (3.0 * rho) * d);
  return {(2.0 * g0 - 5.0 * g1 + 4.0 * g2 - g3) / (rho * rho), rho};
}

}  // namespace rdsym
