#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rdsym/field.hpp"

namespace rdsym {

/// Second-order polar five-point Laplacian u_rr + u_r/r + u_pp/r^2.
/// The disk origin uses the average-of-first-ring stencil
/// 4*(mean(u_ring1) - u0)/r1^2.  Boundary nodes are set to zero.
inline ScalarField laplacian(const ScalarField& f) {
  if (!f.all_finite()) throw std::invalid_argument("laplacian: field has non-finite values");
  const PolarGrid& g = *f.grid;
  ScalarField out(f.grid, 0.0, f.time);
  const int n = g.n_theta();
  const double dr = g.dr();
  const double dphi = g.dphi();
  const double inv_dr2 = 1.0 / (dr * dr);
  const double inv_dphi2 = 1.0 / (dphi * dphi);

  if (g.has_origin()) {
    // Order-canonical sum: the origin stencil stays bit-exactly invariant
    // under ring permutations (grid rotations and reflections).
    const std::size_t base1 = g.node_index(1, 0);
    std::vector<double> ring(f.v.begin() + base1, f.v.begin() + base1 + n);
    std::sort(ring.begin(), ring.end());
    double mean = 0.0;
    for (double x : ring) mean += x;
    mean /= n;
    const double r1 = g.ring_radius(1);
    out.v[g.origin_index()] = 4.0 * (mean - f.v[g.origin_index()]) / (r1 * r1);
  }

  const int j_lo = g.has_origin() ? 1 : 1;  // ring 0 of an annulus is boundary
  for (int j = j_lo; j <= g.n_r() - 1; ++j) {
    const double r = g.ring_radius(j);
    const double inv_2rdr = 1.0 / (2.0 * r * dr);
    const double inv_r2dphi2 = inv_dphi2 / (r * r);
    const std::size_t row = g.node_index(j, 0);
    const std::size_t up = g.node_index(j + 1, 0);
    const bool down_is_origin = g.has_origin() && j == 1;
    const std::size_t down = down_is_origin ? g.origin_index() : g.node_index(j - 1, 0);
    for (int k = 0; k < n; ++k) {
      const double c = f.v[row + k];
      const double fu = f.v[up + k];
      const double fd = down_is_origin ? f.v[down] : f.v[down + k];
      const double fl = f.v[row + (k + n - 1) % n];
      const double fr = f.v[row + (k + 1) % n];
      // (fl + fr) groups first so reflections (which swap the angular
      // neighbors) reproduce the value bit-exactly.
      out.v[row + k] = (fu + fd - 2.0 * c) * inv_dr2 + (fu - fd) * inv_2rdr +
                       ((fl + fr) - 2.0 * c) * inv_r2dphi2;
    }
  }
  return out;
}

enum class BoundarySegment { Outer, Inner };

/// Inward normal derivative on boundary-ring nodes, one-sided second order.
/// Returns one value per node in `nodes`; every node must lie on the
/// requested boundary ring.
inline std::vector<double> normal_derivative(const ScalarField& f, BoundarySegment seg,
                                             const std::vector<std::size_t>& nodes) {
  const PolarGrid& g = *f.grid;
  if (seg == BoundarySegment::Inner && !g.domain().is_annulus())
    throw std::invalid_argument("normal_derivative: disk has no inner boundary");
  const int jb = (seg == BoundarySegment::Outer) ? g.n_r() : 0;
  const int step = (seg == BoundarySegment::Outer) ? -1 : 1;
  std::vector<double> out;
  out.reserve(nodes.size());
  for (std::size_t i : nodes) {
    if (g.ring_of(i) != jb)
      throw std::invalid_argument("normal_derivative: node not on the requested boundary ring");
    const int k = g.angle_index_of(i);
    const double f0 = f.v[i];
    const double f1 = f.v[g.node_index(jb + step, k)];
    const double f2 = f.v[g.node_index(jb + 2 * step, k)];
    out.push_back((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * g.dr()));
  }
  return out;
}

inline std::vector<std::size_t> boundary_ring_nodes(const PolarGrid& g, BoundarySegment seg) {
  const int jb = (seg == BoundarySegment::Outer) ? g.n_r() : 0;
  if (seg == BoundarySegment::Inner && !g.domain().is_annulus())
    throw std::invalid_argument("boundary_ring_nodes: disk has no inner boundary");
  std::vector<std::size_t> out;
  out.reserve(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) out.push_back(g.node_index(jb, k));
  return out;
}

/// Monte-Carlo lower bound on the parabolic Hoelder seminorm
/// sup |f(x,t)-f(y,s)| / (|x-y|^alpha + |t-s|^(alpha/2)).
/// Sampling is incremental in the budget for a fixed seed, so the estimate
/// is nondecreasing in sample_budget.  A boundedness witness, not an
/// upper-bound certificate.
inline double holder_seminorm(const Trajectory& traj, int species, double alpha,
                              const std::vector<std::uint8_t>& mask, double t0, double t1,
                              std::size_t sample_budget, std::uint64_t seed = 1234) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("holder_seminorm: alpha must lie in (0, 1]");
  std::vector<std::size_t> snaps;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const double t = traj.snapshots[s].t;
    if (t >= t0 && t <= t1) snaps.push_back(s);
  }
  if (snaps.size() < 2)
    throw std::invalid_argument("holder_seminorm: need at least 2 snapshots in window");
  const PolarGrid& g = *traj.grid;
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (mask.empty() || mask[i]) nodes.push_back(i);
  if (nodes.empty()) throw std::invalid_argument("holder_seminorm: empty mask");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_snap(0, snaps.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_node(0, nodes.size() - 1);
  double best = 0.0;
  for (std::size_t n = 0; n < sample_budget; ++n) {
    const std::size_t sa = snaps[pick_snap(rng)];
    const std::size_t sb = snaps[pick_snap(rng)];
    const std::size_t ia = nodes[pick_node(rng)];
    const std::size_t ib = nodes[pick_node(rng)];
    if (sa == sb && ia == ib) continue;
    const double ta = traj.snapshots[sa].t, tb = traj.snapshots[sb].t;
    const double fa = traj.species(sa, species).v[ia];
    const double fb = traj.species(sb, species).v[ib];
    const double dx = (g.position(ia) - g.position(ib)).norm();
    const double denom = std::pow(dx, alpha) + std::pow(std::abs(ta - tb), 0.5 * alpha);
    if (denom > 0.0) best = std::max(best, std::abs(fa - fb) / denom);
  }
  return best;
}

}  // namespace rdsym
