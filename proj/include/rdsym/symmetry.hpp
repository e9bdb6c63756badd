#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rdsym/dynamics.hpp"
#include "rdsym/field.hpp"
#include "rdsym/radial.hpp"

namespace rdsym {

/// Signed reflection differences in the two-species convention:
/// u1^e = u1 - u1(sigma_e), u2^e = u2(sigma_e) - u2, on the full grid.
struct ReflectionDifference {
  Direction e;
  ScalarField d1;
  ScalarField d2;
  double t = 0.0;
};

inline ReflectionDifference reflection_difference(const SystemState& state, Direction e) {
  const GridPtr& grid = state.u1.grid;
  const ReflectionMap sigma(*grid, e);
  const auto r1 = sigma.apply(state.u1.v);
  const auto r2 = sigma.apply(state.u2.v);
  ReflectionDifference out{e, ScalarField(grid, 0.0, state.t), ScalarField(grid, 0.0, state.t),
                           state.t};
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    out.d1.v[i] = state.u1.v[i] - r1[i];
    out.d2.v[i] = r2[i] - state.u2.v[i];
  }
  return out;
}

struct HypothesisCheck {
  bool holds = false;
  bool strict = false;
  double violation = 0.0;  // max(0, -min of the differences on B(e))
};

/// Initial-data ordering check: u01 >= u01(sigma_e) and u02 <= u02(sigma_e)
/// on B(e), strict when neither difference is identically below tol.
inline HypothesisCheck check_reflection_hypothesis(const ScalarField& u01,
                                                   const ScalarField& u02, Direction e,
                                                   double tol = 1e-12) {
  const GridPtr& grid = u01.grid;
  const ReflectionMap sigma(*grid, e);
  const auto r1 = sigma.apply(u01.v);
  const auto r2 = sigma.apply(u02.v);
  const auto mask = half_domain_mask(*grid, e);
  double min1 = 0.0, min2 = 0.0, max1 = 0.0, max2 = 0.0;
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    if (!mask[i]) continue;
    const double d1 = u01.v[i] - r1[i];
    const double d2 = r2[i] - u02.v[i];
    min1 = std::min(min1, d1);
    min2 = std::min(min2, d2);
    max1 = std::max(max1, d1);
    max2 = std::max(max2, d2);
  }
  HypothesisCheck out;
  out.holds = (min1 >= -tol) && (min2 >= -tol);
  out.strict = out.holds && (max1 > tol) && (max2 > tol);
  out.violation = std::max(0.0, -std::min(min1, min2));
  return out;
}

struct AxisReport {
  Direction axis;
  double moment = 0.0;  // |angular first moment|
  bool degenerate = false;
  double fss_deviation = 0.0;
  double monotonicity_violation = 0.0;
};

/// Axis candidate from the angular first moment
/// m = sum z(x) (x/|x|) w(x), origin excluded.
inline AxisReport detect_axis(const ScalarField& z) {
  const PolarGrid& g = *z.grid;
  double mx = 0.0, my = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double w = g.weight(i);
    l1 += std::abs(z.v[i]) * w;
    if (g.is_origin(i)) continue;
    const double r = g.radius(i);
    const Point p = g.position(i);
    mx += z.v[i] * w * p.x / r;
    my += z.v[i] * w * p.y / r;
  }
  AxisReport out;
  out.moment = std::hypot(mx, my);
  out.degenerate = out.moment < 1e-10 * l1 || l1 == 0.0;
  out.axis = out.degenerate ? Direction(0.0) : Direction(std::atan2(my, mx));
  return out;
}

namespace detail {

/// Ring slots ordered by increasing angle-to-p, mirror pairs alternating
/// (+ side first), ties broken by index.
inline std::vector<int> theta_order(const PolarGrid& g, Direction p) {
  const int n = g.n_theta();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> theta(n), side(n);
  for (int k = 0; k < n; ++k) {
    const double d = std::remainder(g.node_angle(k) - p.angle, 2.0 * std::numbers::pi);
    theta[k] = std::abs(d);
    side[k] = d >= 0.0 ? 0.0 : 1.0;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (theta[a] != theta[b]) return theta[a] < theta[b];
    if (side[a] != side[b]) return side[a] < side[b];
    return a < b;
  });
  return order;
}

inline double ring_linear_interp(const ScalarField& f, int ring, double phi) {
  const PolarGrid& g = *f.grid;
  const int n = g.n_theta();
  double kr = phi / g.dphi();
  kr = std::fmod(kr, static_cast<double>(n));
  if (kr < 0) kr += n;
  const int k0 = static_cast<int>(kr);
  const double w = kr - k0;
  const std::size_t base = g.node_index(ring, 0);
  return (1.0 - w) * f.v[base + k0 % n] + w * f.v[base + (k0 + 1) % n];
}

}  // namespace detail

/// Per-ring monotone rearrangement about the axis Rp: descending values go
/// to slots of increasing polar angle theta, alternating sides for mirror
/// pairs.  Preserves each ring's value multiset exactly; idempotent.
inline ScalarField foliated_schwarz_symmetrize(const ScalarField& z, Direction p) {
  const PolarGrid& g = *z.grid;
  ScalarField out = z;
  const std::vector<int> order = detail::theta_order(g, p);
  const int n = g.n_theta();
  std::vector<double> vals(n);
  for (int j = g.ring_first(); j <= g.ring_last(); ++j) {
    const std::size_t base = g.node_index(j, 0);
    for (int k = 0; k < n; ++k) vals[k] = z.v[base + k];
    std::stable_sort(vals.begin(), vals.end(), std::greater<double>());
    for (int k = 0; k < n; ++k) out.v[base + order[k]] = vals[k];
  }
  return out;
}

/// Relative L2 distance to the foliated Schwarz rearrangement about p.
inline double fss_deviation(const ScalarField& z, Direction p, double floor = 1e-30) {
  const PolarGrid& g = *z.grid;
  const ScalarField s = foliated_schwarz_symmetrize(z, p);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double w = g.weight(i);
    const double d = z.v[i] - s.v[i];
    num += w * d * d;
    den += w * z.v[i] * z.v[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

/// Largest ascent of z along the angle-to-p ladder, per ring and side,
/// with linear interpolation onto the symmetric theta ladder.
inline double angular_monotonicity_violation(const ScalarField& z, Direction p) {
  const PolarGrid& g = *z.grid;
  const int half = g.n_theta() / 2;
  double worst = 0.0;
  for (int j = g.ring_first(); j <= g.ring_last(); ++j) {
    for (const double sgn : {1.0, -1.0}) {
      double prev = detail::ring_linear_interp(z, j, p.angle);
      for (int m = 1; m <= half; ++m) {
        const double cur = detail::ring_linear_interp(z, j, p.angle + sgn * m * g.dphi());
        worst = std::max(worst, cur - prev);
        prev = cur;
      }
    }
  }
  return worst;
}

/// Ring-wise angular means as a radial profile (the origin keeps its value).
inline RadialProfile radial_average(const ScalarField& z) {
  const PolarGrid& g = *z.grid;
  RadialProfile prof{g.domain(), g.n_r(), std::vector<double>(g.n_r() + 1, 0.0)};
  if (g.has_origin()) prof.values[0] = z.v[g.origin_index()];
  for (int j = g.ring_first(); j <= g.ring_last(); ++j) {
    const double first = z.v[g.node_index(j, 0)];
    double mean = 0.0;
    bool constant = true;
    for (int k = 0; k < g.n_theta(); ++k) {
      const double v = z.v[g.node_index(j, k)];
      mean += v;
      constant = constant && v == first;
    }
    // Constant rings average to their value exactly.
    prof.values[j] = constant ? first : mean / g.n_theta();
  }
  return prof;
}

/// Relative L2 distance to the field's own angular average.
inline double radial_deviation(const ScalarField& z, double floor = 1e-30) {
  const PolarGrid& g = *z.grid;
  const RadialProfile mean = radial_average(z);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double w = g.weight(i);
    const int j = g.is_origin(i) ? 0 : g.ring_of(i);
    const double d = z.v[i] - mean.values[j];
    num += w * d * d;
    den += w * z.v[i] * z.v[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

/// Deviation from antipodality of two detected axes, in radians.
inline double antipodality_gap(Direction p1, Direction p2) {
  return std::abs(std::remainder(p1.angle - p2.angle - std::numbers::pi, 2.0 * std::numbers::pi));
}

/// Axis detection plus the deviation metrics about the detected axis.
inline AxisReport analyze_axis(const ScalarField& z) {
  AxisReport rep = detect_axis(z);
  rep.fss_deviation = fss_deviation(z, rep.axis);
  rep.monotonicity_violation = angular_monotonicity_violation(z, rep.axis);
  return rep;
}

}  // namespace rdsym
