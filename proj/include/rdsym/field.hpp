#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdsym/geometry.hpp"

namespace rdsym {

using GridPtr = std::shared_ptr<const PolarGrid>;

inline GridPtr make_grid(DomainSpec domain, int n_r, int n_theta) {
  return std::make_shared<const PolarGrid>(domain, n_r, n_theta);
}

/// One real value per grid node at one time.
struct ScalarField {
  GridPtr grid;
  std::vector<double> v;
  double time = 0.0;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double value = 0.0, double t = 0.0)
      : grid(std::move(g)), v(grid->node_count(), value), time(t) {}

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  double min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
  }
};

/// Samples a function of position onto the grid.
template <typename F>
ScalarField sample_field(const GridPtr& grid, F&& f, double t = 0.0) {
  ScalarField out(grid, 0.0, t);
  for (std::size_t i = 0; i < grid->node_count(); ++i) out.v[i] = f(grid->position(i));
  return out;
}

/// Samples a radial profile g(r) onto the grid.
template <typename F>
ScalarField sample_radial(const GridPtr& grid, F&& g, double t = 0.0) {
  ScalarField out(grid, 0.0, t);
  for (std::size_t i = 0; i < grid->node_count(); ++i) out.v[i] = g(grid->radius(i));
  return out;
}

/// One snapshot of the two-species state.
struct Snapshot {
  double t = 0.0;
  ScalarField u1;
  ScalarField u2;
};

/// Time-ordered snapshot sequence of one run; all snapshots share one grid.
struct Trajectory {
  GridPtr grid;
  double dt = 0.0;
  std::string scenario_id;
  std::vector<Snapshot> snapshots;

  void push(Snapshot s) {
    if (!snapshots.empty() && !(s.t > snapshots.back().t))
      throw std::invalid_argument("Trajectory: timestamps must be strictly increasing");
    snapshots.push_back(std::move(s));
  }

  double t_begin() const { return snapshots.front().t; }
  double t_end() const { return snapshots.back().t; }

  const ScalarField& species(std::size_t snap, int i) const {
    return i == 0 ? snapshots[snap].u1 : snapshots[snap].u2;
  }
};

enum class NormKind { Sup, L2, Lp };

/// Region/time-window norm specification over a trajectory or a field.
struct RegionNorm {
  std::vector<std::uint8_t> mask;  // empty means all nodes
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  NormKind kind = NormKind::Sup;
  double p = 2.0;
};

namespace detail {

inline bool in_mask(const std::vector<std::uint8_t>& mask, std::size_t i) {
  return mask.empty() || mask[i] != 0;
}

inline double spatial_norm(const ScalarField& f, const std::vector<std::uint8_t>& mask,
                           NormKind kind, double p) {
  const PolarGrid& g = *f.grid;
  bool any = false;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!in_mask(mask, i)) continue;
    any = true;
    const double x = std::abs(f.v[i]);
    switch (kind) {
      case NormKind::Sup: acc = std::max(acc, x); break;
      case NormKind::L2: acc += g.weight(i) * x * x; break;
      case NormKind::Lp: acc += g.weight(i) * std::pow(x, p); break;
    }
  }
  if (!any) throw std::invalid_argument("region_norm: empty mask");
  if (kind == NormKind::L2) return std::sqrt(acc);
  if (kind == NormKind::Lp) return std::pow(acc, 1.0 / p);
  return acc;
}

}  // namespace detail

inline double region_norm(const ScalarField& f, const RegionNorm& spec) {
  return detail::spatial_norm(f, spec.mask, spec.kind, spec.p);
}

/// Norm over masked nodes and windowed snapshots.  Sup is the plain
/// space-time sup; L2/Lp average the per-snapshot integrals in time
/// (uniform snapshot weights) before taking the root.
inline double region_norm(const Trajectory& traj, int species, const RegionNorm& spec) {
  if (traj.snapshots.empty()) throw std::invalid_argument("region_norm: empty trajectory");
  if (spec.t0 > spec.t1) throw std::invalid_argument("region_norm: empty time window");
  bool any = false;
  double sup = 0.0, acc = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const double t = traj.snapshots[s].t;
    if (t < spec.t0 || t > spec.t1) continue;
    any = true;
    const ScalarField& f = traj.species(s, species);
    if (spec.kind == NormKind::Sup) {
      RegionNorm sub = spec;
      sup = std::max(sup, detail::spatial_norm(f, sub.mask, NormKind::Sup, spec.p));
    } else {
      const double n = detail::spatial_norm(f, spec.mask, spec.kind, spec.p);
      const double q = (spec.kind == NormKind::L2) ? 2.0 : spec.p;
      acc += std::pow(n, q);
      ++count;
    }
  }
  if (!any) throw std::invalid_argument("region_norm: no snapshots in window");
  if (spec.kind == NormKind::Sup) return sup;
  const double q = (spec.kind == NormKind::L2) ? 2.0 : spec.p;
  return std::pow(acc / count, 1.0 / q);
}

}  // namespace rdsym
