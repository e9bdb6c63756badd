#pragma once

#include <cmath>
#include <utility>

#include "rdsym/field.hpp"

namespace rdsym {

/// Smooth cutoff vanishing on dB: disk (A2^2 - r^2)/A2^2, annulus the
/// normalized product 4 (A2 - r)(r - A1)/(A2 - A1)^2.
inline double boundary_taper(const DomainSpec& dom, double r) {
  const double a1 = dom.inner_radius, a2 = dom.outer_radius;
  if (dom.is_disk()) return (a2 * a2 - r * r) / (a2 * a2);
  return 4.0 * (a2 - r) * (r - a1) / ((a2 - a1) * (a2 - a1));
}

/// Radial Gaussian ring bump, pinned to zero on dB.  Sampled per ring so
/// the field is exactly constant on each ring.
inline ScalarField radial_bump(const GridPtr& grid, double amplitude, double center_radius,
                               double width) {
  const DomainSpec dom = grid->domain();
  return sample_radial(grid, [=](double r) {
    const double arg = (r - center_radius) / width;
    return amplitude * std::exp(-0.5 * arg * arg) * boundary_taper(dom, r);
  });
}

/// The canonical strict-(h0) construction: species 1 bumped toward +offset*e,
/// species 2 the mirror image toward -offset*e.  For offset > 0 the
/// reflection inequalities hold strictly on B(e).  On a grid-aligned axis
/// species 2 is built as the exact index permutation of species 1, so the
/// mirror relation u2 = u1(sigma_e) holds bitwise.
inline std::pair<ScalarField, ScalarField> shifted_bump_pair(const GridPtr& grid,
                                                             double amplitude, double offset,
                                                             double width, Direction e) {
  const DomainSpec dom = grid->domain();
  auto bump = [&](Point center) {
    return sample_field(grid, [=](Point p) {
      const Point d = p - center;
      return amplitude * std::exp(-0.5 * dot(d, d) / (width * width)) *
             boundary_taper(dom, p.norm());
    });
  };
  ScalarField u1 = bump(offset * e.vec());
  const ReflectionMap sigma(*grid, e);
  if (sigma.exact()) {
    ScalarField u2 = u1;
    u2.v = sigma.apply(u1.v);
    return {std::move(u1), std::move(u2)};
  }
  return {std::move(u1), bump(-offset * e.vec())};
}

}  // namespace rdsym
