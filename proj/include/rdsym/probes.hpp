#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rdsym/field.hpp"
#include "rdsym/interpolate.hpp"
#include "rdsym/operators.hpp"
#include "rdsym/symmetry.hpp"

namespace rdsym {

/// Affine view of a trajectory slice onto the unit time window.  The probes
/// compare signs and ratios, which survive the reparametrization.
struct TrajectoryView {
  const Trajectory* traj = nullptr;
  double t0 = 0.0;
  double t1 = 1.0;

  double time_at(double fraction) const { return t0 + fraction * (t1 - t0); }

  std::vector<const Snapshot*> between(double f_lo, double f_hi) const {
    const double lo = time_at(f_lo), hi = time_at(f_hi);
    const double tol = 1e-9 * std::max(1.0, std::abs(t1));
    std::vector<const Snapshot*> out;
    for (const Snapshot& s : traj->snapshots)
      if (s.t >= lo - tol && s.t <= hi + tol) out.push_back(&s);
    return out;
  }
};

inline TrajectoryView rescale_window(const Trajectory& traj, double t_center, double width) {
  if (traj.snapshots.empty()) throw std::invalid_argument("rescale_window: empty trajectory");
  const double lo = t_center - width;
  const double tol = 1e-9 * std::max(1.0, width);
  if (lo < traj.t_begin() - tol || t_center > traj.t_end() + tol)
    throw std::invalid_argument("rescale_window: window outside the trajectory span");
  return {&traj, lo, t_center};
}

/// Default probe fractions on the unit window: average over [1/7, 4/7],
/// take the infimum over [6/7, 1].
inline constexpr std::array<double, 4> kDefaultHarnackFractions{1.0 / 7.0, 4.0 / 7.0, 6.0 / 7.0,
                                                                1.0};

struct HarnackReport {
  double kappa = 0.0;
  double inf_value = 0.0;
  double avg_value = 0.0;
  double p_exp = 1.0;
  std::size_t nodes = 0;
};

/// Empirical Harnack constant: inf over D x (tau3, tau4) divided by the
/// p-averaged norm over D x (tau1, tau2).  Requires positivity on D.
inline HarnackReport harnack_ratio(const TrajectoryView& view, int species,
                                   const std::vector<std::uint8_t>& D,
                                   std::array<double, 4> fr = kDefaultHarnackFractions,
                                   double p_exp = 1.0) {
  const PolarGrid& g = *view.traj->grid;
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (D[i]) nodes.push_back(i);
  if (nodes.empty()) throw std::invalid_argument("harnack_ratio: empty mask");

  const auto early = view.between(fr[0], fr[1]);
  const auto late = view.between(fr[2], fr[3]);
  if (early.empty() || late.empty())
    throw std::invalid_argument("harnack_ratio: no snapshots in a probe window");

  double area = 0.0;
  for (std::size_t i : nodes) area += g.weight(i);

  auto check_positive = [&](const Snapshot* s) {
    const ScalarField& f = species == 0 ? s->u1 : s->u2;
    for (std::size_t i : nodes)
      if (!(f.v[i] > 0.0))
        throw std::runtime_error("Harnack probe requires positivity on D");
  };

  double avg = 0.0;
  for (const Snapshot* s : early) {
    check_positive(s);
    const ScalarField& f = species == 0 ? s->u1 : s->u2;
    double integral = 0.0;
    for (std::size_t i : nodes) integral += g.weight(i) * std::pow(f.v[i], p_exp);
    avg += integral / area;
  }
  avg /= early.size();

  double inf = std::numeric_limits<double>::infinity();
  for (const Snapshot* s : late) {
    check_positive(s);
    const ScalarField& f = species == 0 ? s->u1 : s->u2;
    for (std::size_t i : nodes) inf = std::min(inf, f.v[i]);
  }

  HarnackReport rep;
  rep.p_exp = p_exp;
  rep.inf_value = inf;
  rep.avg_value = std::pow(avg, 1.0 / p_exp);
  rep.kappa = inf / rep.avg_value;
  rep.nodes = nodes.size();
  return rep;
}

struct WedgeSlopeSpecies {
  double mu = 0.0;   // min of u^e / (x.e) on the wedge region
  double eps = 0.0;  // min inward slope on the half-domain boundary
  bool degenerate = false;
};

struct WedgeSlopeReport {
  Direction e;
  double delta = 0.0;
  std::array<WedgeSlopeSpecies, 2> species{};
};

/// Wedge bound u^e >= mu * (x.e) away from dB, and boundary slope
/// d(u^e)/d(nu) >= eps away from the corners, both over the late window
/// [6/7, 1].  Errors out if the sign hypothesis u^e >= -tol fails on B(e).
inline WedgeSlopeReport wedge_and_slope_probe(const TrajectoryView& view, Direction e,
                                              double delta, double sign_tol) {
  const PolarGrid& g = *view.traj->grid;
  const auto late = view.between(6.0 / 7.0, 1.0);
  if (late.empty()) throw std::invalid_argument("wedge_and_slope_probe: empty late window");
  const auto half = half_domain_mask(g, e);

  std::vector<Point> corners;
  for (const CornerFrame& c : corner_frames(g, e)) corners.push_back(c.corner);
  auto corner_dist = [&](Point p) {
    double d = std::numeric_limits<double>::infinity();
    for (const Point& q : corners) d = std::min(d, (p - q).norm());
    return d;
  };

  // Wedge nodes: B(e) away from dB.  Slope nodes: dB cap {x.e > 0} away
  // from the corner set.
  std::vector<std::size_t> wedge, slope_outer, slope_inner;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (half[i] && !g.is_boundary(i) && g.boundary_distance(i) > delta) wedge.push_back(i);
    if (half[i] && g.is_boundary(i) && corner_dist(g.position(i)) > delta) {
      if (g.ring_of(i) == g.n_r())
        slope_outer.push_back(i);
      else
        slope_inner.push_back(i);
    }
  }
  if (wedge.empty()) throw std::invalid_argument("wedge_and_slope_probe: wedge region empty");

  // Ladder points on the flat piece H(e) cap B, where nu = e; the inward
  // derivative uses the antisymmetry of u^e about H(e).
  std::vector<Point> flat;
  const double rho = 2.0 * g.h();
  for (const double side : {0.5 * M_PI, -0.5 * M_PI}) {
    const double beta = e.angle + side;
    const Point u{std::cos(beta), std::sin(beta)};
    for (int j = g.ring_first(); j < g.n_r(); ++j) {
      const double r = g.ring_radius(j);
      const Point x = r * u;
      if (corner_dist(x) <= delta) continue;
      const Point probe_pt = x + (2.0 * rho) * e.vec();
      if (!g.domain().contains(probe_pt, 1e-12)) continue;
      flat.push_back(x);
    }
  }

  WedgeSlopeReport rep{e, delta, {}};
  std::array<double, 2> mu{}, eps{}, sup_abs{};
  mu.fill(std::numeric_limits<double>::infinity());
  eps.fill(std::numeric_limits<double>::infinity());
  for (const Snapshot* s : late) {
    const ReflectionDifference diff = reflection_difference({s->u1, s->u2, s->t}, e);
    for (int sp = 0; sp < 2; ++sp) {
      const ScalarField& d = sp == 0 ? diff.d1 : diff.d2;
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!half[i]) continue;
        sup_abs[sp] = std::max(sup_abs[sp], std::abs(d.v[i]));
        if (d.v[i] < -sign_tol)
          throw std::runtime_error("wedge_and_slope_probe: sign hypothesis violated by " +
                                   std::to_string(-d.v[i]));
      }
      for (std::size_t i : wedge) {
        const Point p = g.position(i);
        mu[sp] = std::min(mu[sp], d.v[i] / dot(p, e.vec()));
      }
      if (!slope_outer.empty()) {
        for (double v : normal_derivative(d, BoundarySegment::Outer, slope_outer))
          eps[sp] = std::min(eps[sp], v);
      }
      if (!slope_inner.empty()) {
        for (double v : normal_derivative(d, BoundarySegment::Inner, slope_inner))
          eps[sp] = std::min(eps[sp], v);
      }
      for (const Point& x : flat) {
        // f(lambda) = u^e(x + lambda e) is odd in lambda.
        const double f1 = interpolate(d, x + rho * e.vec());
        const double f2 = interpolate(d, x + (2.0 * rho) * e.vec());
        eps[sp] = std::min(eps[sp], (8.0 * f1 - f2) / (6.0 * rho));
      }
    }
  }
  for (int sp = 0; sp < 2; ++sp) {
    WedgeSlopeSpecies& out = rep.species[sp];
    out.degenerate = sup_abs[sp] <= sign_tol;
    out.mu = out.degenerate ? 0.0 : mu[sp];
    out.eps = out.degenerate ? 0.0 : eps[sp];
  }
  return rep;
}

struct CornerCurvature {
  CornerFrame frame;
  double d_ss = 0.0;
  double d_stst = 0.0;
  double rho = 0.0;
  double antisymmetry_gap = 0.0;  // |d_ss + d_stst|
};

struct CornerReport {
  Direction e;
  std::array<std::vector<CornerCurvature>, 2> species{};
  std::array<bool, 2> sign_pattern{};  // d_ss > 0 and d_stst < 0 at every corner
  std::array<bool, 2> degenerate{};
};

/// Second derivatives of the reflection differences along the corner
/// diagonals s and s~.  The s~ ray leaves B(e), so it is sampled along -s~
/// (second derivatives are direction-sign invariant).
inline CornerReport corner_curvature_probe(const SystemState& state, Direction e,
                                           double rho = 0.0, double degenerate_tol = 0.0) {
  const PolarGrid& g = *state.u1.grid;
  const ReflectionDifference diff = reflection_difference(state, e);
  CornerReport rep;
  rep.e = e;
  if (degenerate_tol <= 0.0)
    degenerate_tol = 1e-12 * std::max(state.u1.max_abs(), state.u2.max_abs());
  for (int sp = 0; sp < 2; ++sp) {
    const ScalarField& d = sp == 0 ? diff.d1 : diff.d2;
    bool pattern = true;
    for (const CornerFrame& frame : corner_frames(g, e)) {
      CornerCurvature c;
      c.frame = frame;
      const auto along_s = directional_second_derivative(d, frame.corner, frame.s, rho);
      const Point minus_st = -1.0 * frame.s_tilde;
      const auto along_st = directional_second_derivative(d, frame.corner, minus_st, rho);
      c.d_ss = along_s.value;
      c.d_stst = along_st.value;
      c.rho = along_s.rho;
      c.antisymmetry_gap = std::abs(c.d_ss + c.d_stst);
      pattern = pattern && c.d_ss > 0.0 && c.d_stst < 0.0;
      rep.species[sp].push_back(c);
    }
    double sup = 0.0;
    for (const CornerCurvature& c : rep.species[sp])
      sup = std::max(sup, std::max(std::abs(c.d_ss), std::abs(c.d_stst)));
    rep.degenerate[sp] = sup <= degenerate_tol;
    rep.sign_pattern[sp] = pattern && !rep.degenerate[sp];
  }
  return rep;
}

struct CornerPositivity {
  double delta = 0.0;      // largest verified neighborhood radius
  double delta_cap = 0.0;  // scan ceiling (half the radial gap)
  bool full_reach = false;
};

/// Largest delta with w >= -tol on [H(e) cap dB]_delta cap B(e), scanned
/// over grid nodes ordered by distance to the corner set.
inline CornerPositivity corner_positivity_check(const ScalarField& w, Direction e,
                                                double tol = 1e-12) {
  const PolarGrid& g = *w.grid;
  const auto half = half_domain_mask(g, e);
  std::vector<Point> corners;
  for (const CornerFrame& c : corner_frames(g, e)) corners.push_back(c.corner);

  CornerPositivity out;
  out.delta_cap = g.domain().half_gap();
  std::vector<std::pair<double, bool>> ordered;  // (corner distance, w >= -tol)
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (!half[i]) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const Point& q : corners) d = std::min(d, (g.position(i) - q).norm());
    if (d > out.delta_cap) continue;
    ordered.emplace_back(d, w.v[i] >= -tol);
  }
  std::sort(ordered.begin(), ordered.end());
  double verified = 0.0;
  for (const auto& [d, ok] : ordered) {
    if (!ok) {
      out.delta = verified;
      return out;
    }
    verified = d;
  }
  out.delta = out.delta_cap;
  out.full_reach = true;
  return out;
}

enum class ComparisonKind { Interior, Corner };

struct ComparisonReport {
  double max_residual = -std::numeric_limits<double>::infinity();
  std::size_t points = 0;
  double decay_rate = 0.0;  // gamma (interior) or theta (corner)
};

/// Pointwise value of the comparison barrier (N = 2):
///   interior: (exp(-gamma(|x-y|^2+(t-t*)^2)) - exp(-gamma r^2)) e^(-beta0 t),
///   corner:   (x.e) times the same envelope with theta in place of gamma.
inline double comparison_barrier_value(ComparisonKind kind, Direction e, Point y, double radius,
                                       double t_star, double beta0, Point x, double t) {
  constexpr int N = 2;
  const double r2 = radius * radius;
  const double rate = (kind == ComparisonKind::Interior) ? 2.0 * (N + 1) / r2 : 2.0 * (N + 3) / r2;
  const double d2 = dot(x - y, x - y) + (t - t_star) * (t - t_star);
  const double core = (std::exp(-rate * d2) - std::exp(-rate * r2)) * std::exp(-beta0 * t);
  return (kind == ComparisonKind::Interior) ? core : dot(x, e.vec()) * core;
}

/// Discrete subsolution residual z_t - Lap_h z - c z of the two barrier
/// functions over their space-time comparison regions (N = 2):
///   interior: z = (exp(-gamma(|x-y|^2+(t-t*)^2)) - exp(-gamma r^2)) e^(-beta0 t),
///             gamma = 2(N+1)/r^2, region anchored at x* = radial projection
///             of y onto the outer boundary;
///   corner:   phi = (x.e) (exp(-theta(..)) - exp(-theta r^2)) e^(-beta0 t),
///             theta = 2(N+3)/r^2, region anchored at the corner nearest y.
/// The continuous residual is nonpositive; the probe reports the discrete max.
inline ComparisonReport comparison_residual(const GridPtr& grid, ComparisonKind kind, Direction e,
                                            Point y, double radius, double t_star, double beta0,
                                            const std::function<double(Point, double)>& c_field,
                                            int n_time_samples = 9) {
  const PolarGrid& g = *grid;
  constexpr int N = 2;
  const double r2 = radius * radius;
  const double rate = (kind == ComparisonKind::Interior) ? 2.0 * (N + 1) / r2 : 2.0 * (N + 3) / r2;

  Point x_star;
  if (kind == ComparisonKind::Interior) {
    const double ry = y.norm();
    if (ry == 0.0) throw std::invalid_argument("comparison_residual: y at the origin");
    x_star = (g.domain().outer_radius / ry) * y;
  } else {
    if (std::abs(dot(y, e.vec())) > 1e-9 * g.domain().outer_radius)
      throw std::invalid_argument("comparison_residual: corner kind needs y on H(e)");
    double best = std::numeric_limits<double>::infinity();
    for (const CornerFrame& c : corner_frames(g, e)) {
      const double d = (c.corner - y).norm();
      if (d < best) {
        best = d;
        x_star = c.corner;
      }
    }
  }
  if (std::abs((x_star - y).norm() - radius) > 0.05 * radius)
    throw std::invalid_argument("comparison_residual: y is not at distance r from the boundary anchor");

  const auto half = half_domain_mask(g, e);

  ComparisonReport rep;
  rep.decay_rate = rate;
  for (int q = 0; q < n_time_samples; ++q) {
    const double t = t_star - radius + radius * (q + 1.0) / n_time_samples;
    const double dt2 = (t - t_star) * (t - t_star);
    ScalarField z(grid, 0.0, t);
    ScalarField zt(grid, 0.0, t);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const Point p = g.position(i);
      const double d2 = dot(p - y, p - y) + dt2;
      const double E = std::exp(-rate * d2);
      const double decay = std::exp(-beta0 * t);
      const double core = (E - std::exp(-rate * r2)) * decay;
      const double core_t = -2.0 * rate * (t - t_star) * E * decay - beta0 * core;
      if (kind == ComparisonKind::Interior) {
        z.v[i] = core;
        zt.v[i] = core_t;
      } else {
        const double x1 = dot(p, e.vec());
        z.v[i] = x1 * core;
        zt.v[i] = x1 * core_t;
      }
    }
    const ScalarField lap = laplacian(z);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (!half[i] || g.is_boundary(i)) continue;
      const Point p = g.position(i);
      const double space2 = dot(p - y, p - y);
      if (space2 + dt2 > r2) continue;
      const double close2 = dot(p - x_star, p - x_star) + dt2;
      if (close2 > 0.25 * r2) continue;
      const double c = c_field(p, t);
      if (std::abs(c) > beta0 * (1.0 + 1e-12))
        throw std::invalid_argument("comparison_residual: |c| exceeds beta0 on the region");
      rep.max_residual = std::max(rep.max_residual, zt.v[i] - lap.v[i] - c * z.v[i]);
      ++rep.points;
    }
  }
  if (rep.points == 0) throw std::invalid_argument("comparison_residual: region misses the grid");
  return rep;
}

struct QuotientSample {
  double t_n = 0.0;
  double beta_n = 0.0;    // normalizing sup norm at t_n
  double c_sup = 0.0;     // max of the normalized solution over the window
  double c_fit = 0.0;     // fitted prefactor of v ~ C dist^theta near dB
  double theta_fit = 0.0;
};

struct QuotientReport {
  std::vector<QuotientSample> samples;
  std::vector<std::pair<double, double>> unit_ratios;  // (tau, sup(tau+1)/sup(tau))
};

/// Normalized-quotient probe: v_n = u / ||u(t_n)||_inf over [t_n - k, t_n + k],
/// its sup, and a log-log fit of v_n against dist(x, dB) on the outer band.
/// Also tracks the unit-time sup-norm ratio series.
inline QuotientReport normalized_quotient_probe(const Trajectory& traj, int species,
                                                const std::vector<double>& t_list,
                                                double half_width, double band_fraction = 0.1) {
  const PolarGrid& g = *traj.grid;
  auto nearest = [&](double t) -> const Snapshot& {
    std::size_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      const double d = std::abs(traj.snapshots[s].t - t);
      if (d < gap) {
        gap = d;
        best = s;
      }
    }
    return traj.snapshots[best];
  };

  double dist_max = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    dist_max = std::max(dist_max, g.boundary_distance(i));
  const double band = band_fraction * dist_max;

  QuotientReport rep;
  for (double t_n : t_list) {
    const Snapshot& sn = nearest(t_n);
    const ScalarField& un = species == 0 ? sn.u1 : sn.u2;
    const double beta = un.max_abs();
    if (!(beta > 0.0)) throw std::runtime_error("normalized_quotient_probe: zero normalizer");

    QuotientSample sample;
    sample.t_n = sn.t;
    sample.beta_n = beta;
    for (const Snapshot& s : traj.snapshots) {
      if (s.t < t_n - half_width || s.t > t_n + half_width) continue;
      const ScalarField& u = species == 0 ? s.u1 : s.u2;
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (g.is_interior(i) && !(u.v[i] > 0.0))
          throw std::runtime_error("normalized_quotient_probe: nonpositive values in the interior");
        sample.c_sup = std::max(sample.c_sup, u.v[i] / beta);
      }
    }

    // Least squares log v = log C + theta log d over the outer band.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      if (!g.is_interior(i)) continue;
      const double d = g.boundary_distance(i);
      if (d > band) continue;
      const double v = un.v[i] / beta;
      const double lx = std::log(d), ly = std::log(v);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n >= 2) {
      const double denom = n * sxx - sx * sx;
      sample.theta_fit = (n * sxy - sx * sy) / denom;
      sample.c_fit = std::exp((sy - sample.theta_fit * sx) / n);
    }
    rep.samples.push_back(sample);
  }

  for (const Snapshot& s : traj.snapshots) {
    const double tau = s.t;
    if (tau + 1.0 > traj.t_end() + 1e-9) break;
    const Snapshot& later = nearest(tau + 1.0);
    if (std::abs(later.t - (tau + 1.0)) > 0.51 * (traj.snapshots[1].t - traj.snapshots[0].t))
      continue;
    const ScalarField& a = species == 0 ? s.u1 : s.u2;
    const ScalarField& b = species == 0 ? later.u1 : later.u2;
    const double na = a.max_abs();
    if (na > 0.0) rep.unit_ratios.emplace_back(tau, b.max_abs() / na);
  }
  return rep;
}

}  // namespace rdsym
