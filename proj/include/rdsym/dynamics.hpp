#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rdsym/coefficients.hpp"
#include "rdsym/diffusion.hpp"
#include "rdsym/field.hpp"
#include "rdsym/operators.hpp"
#include "rdsym/quadrature.hpp"

namespace rdsym {

/// Two-species state; u_i vanish on the Dirichlet boundary nodes.
struct SystemState {
  ScalarField u1;
  ScalarField u2;
  double t = 0.0;

  const ScalarField& species(int i) const { return i == 0 ? u1 : u2; }
  ScalarField& species(int i) { return i == 0 ? u1 : u2; }
};

inline SystemState make_state(const GridPtr& grid, const ScalarField& u1, const ScalarField& u2,
                              double t = 0.0) {
  SystemState s{u1, u2, t};
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    if (grid->is_boundary(i)) {
      s.u1.v[i] = 0.0;
      s.u2.v[i] = 0.0;
    }
  }
  s.u1.time = s.u2.time = t;
  return s;
}

/// Pointwise reaction (f_1(t,r,u1) - alpha_1 u1 u2, f_2(t,r,u2) - alpha_2 u1 u2)
/// with rates evaluated at time t_eval.
inline std::pair<ScalarField, ScalarField> reaction_eval(const SystemState& state,
                                                         const CoefficientSet& coeffs,
                                                         const std::array<NonlinearitySpec, 2>& nl,
                                                         std::optional<double> t_eval = {}) {
  const double t = t_eval.value_or(state.t);
  const GridPtr& grid = state.u1.grid;
  ScalarField r1(grid, 0.0, state.t), r2(grid, 0.0, state.t);
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    const double r = grid->radius(i);
    const double a1 = coeffs.alpha_value(0, r, t);
    const double a2 = coeffs.alpha_value(1, r, t);
    const double v1 = state.u1.v[i];
    const double v2 = state.u2.v[i];
    r1.v[i] = nl[0].f(t, r, v1) - a1 * v1 * v2;
    r2.v[i] = nl[1].f(t, r, v2) - a2 * v1 * v2;
  }
  return {std::move(r1), std::move(r2)};
}

/// Explicit-reaction stability bound with a factor-2 margin:
/// dt <= 0.5 / (sup |dv f| + alpha_cap * U), U the current amplitude bound.
inline double dt_max(const SystemState& state, const CoefficientSet& coeffs,
                     const std::array<NonlinearitySpec, 2>& nl) {
  double u_amp = std::max(state.u1.max_abs(), state.u2.max_abs());
  for (int i = 0; i < 2; ++i) {
    if (nl[i].logistic && nl[i].b.lower() > 0.0)
      u_amp = std::max(u_amp, nl[i].a.upper() / nl[i].b.lower());
  }
  const double dv = std::max(nl[0].dv_bound(u_amp), nl[1].dv_bound(u_amp));
  const double rate = std::max(dv + coeffs.alpha_cap() * u_amp, 1e-300);
  return 0.5 / rate;
}

struct StepStats {
  SolveStats u1;
  SolveStats u2;
  int max_iterations() const { return std::max(u1.iterations, u2.iterations); }
  int total_iterations() const { return u1.iterations + u2.iterations; }
  double max_residual() const { return std::max(u1.relative_residual, u2.relative_residual); }
};

/// One IMEX step: explicit reaction with rates sampled at t + dt/2, then a
/// backward-Euler diffusion solve.  Dirichlet zeros are preserved exactly.
inline std::pair<SystemState, StepStats> step(const SystemState& state, double dt,
                                              const CoefficientSet& coeffs,
                                              const std::array<NonlinearitySpec, 2>& nl,
                                              DiffusionSolver& solver) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const double bound = dt_max(state, coeffs, nl);
  if (dt > bound)
    throw std::invalid_argument("step: dt " + std::to_string(dt) +
                                " violates the reaction stability bound " + std::to_string(bound));
  auto [f1, f2] = reaction_eval(state, coeffs, nl, state.t + 0.5 * dt);
  const GridPtr& grid = state.u1.grid;
  ScalarField mid1(grid, 0.0, state.t), mid2(grid, 0.0, state.t);
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    if (grid->is_boundary(i)) continue;
    mid1.v[i] = state.u1.v[i] + dt * f1.v[i];
    mid2.v[i] = state.u2.v[i] + dt * f2.v[i];
  }
  SystemState out;
  out.t = state.t + dt;
  StepStats stats;
  stats.u1 = solver.solve(mid1, out.u1);
  stats.u2 = solver.solve(mid2, out.u2);
  out.u1.time = out.u2.time = out.t;
  return {std::move(out), stats};
}

/// Convenience overload building a one-shot solver.
inline SystemState step(const SystemState& state, double dt, const CoefficientSet& coeffs,
                        const std::array<NonlinearitySpec, 2>& nl) {
  DiffusionSolver solver(state.u1.grid, dt);
  return step(state, dt, coeffs, nl, solver).first;
}

struct SimulateOptions {
  int snapshot_every_steps = 1;
  double blowup_guard = 1e6;
  std::string scenario_id;
  // Mirror coupling confines the run to the invariant manifold
  // u2 = u1(sigma_e) of a species-symmetric system: species 1 takes the
  // IMEX step and species 2 is realized as its exact index permutation.
  // Algebraically the same update; it removes the round-off seed that
  // otherwise breaks the exact tie of a symmetric pair.
  bool mirror_coupling = false;
  Direction mirror_direction;
};

inline SimulateOptions snapshots_every(int steps) {
  SimulateOptions opts;
  opts.snapshot_every_steps = steps;
  return opts;
}

struct SimulateStats {
  long steps = 0;
  double max_undershoot = 0.0;  // most negative value seen, as a magnitude
  double sup_norm = 0.0;        // largest sup norm over the run
  int max_solver_iterations = 0;
  double max_solver_residual = 0.0;
  long total_solver_iterations = 0;
};

struct SimulationResult {
  Trajectory trajectory;
  SimulateStats stats;
};

/// Advances the system to t_end, snapshotting at the requested cadence
/// (the initial and final states are always recorded).  Aborts when the
/// sup norm exceeds the blowup guard.
inline SimulationResult simulate(const SystemState& initial, const CoefficientSet& coeffs,
                                 const std::array<NonlinearitySpec, 2>& nl, double t_end,
                                 double dt, const SimulateOptions& opts = {}) {
  if (t_end < initial.t) throw std::invalid_argument("simulate: t_end before initial time");
  const GridPtr& grid = initial.u1.grid;
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    if (grid->is_boundary(i) && (initial.u1.v[i] != 0.0 || initial.u2.v[i] != 0.0))
      throw std::invalid_argument("simulate: initial data must vanish on the boundary");
  }
  if (coeffs.competitive && (initial.u1.min_value() < 0.0 || initial.u2.min_value() < 0.0))
    throw std::invalid_argument("simulate: competitive mode requires nonnegative initial data");

  std::unique_ptr<ReflectionMap> mirror;
  if (opts.mirror_coupling) {
    mirror = std::make_unique<ReflectionMap>(*grid, opts.mirror_direction);
    if (!mirror->exact())
      throw std::invalid_argument("simulate: mirror coupling needs a grid-aligned axis");
    if (!(coeffs.a[0] == coeffs.a[1]) || !(coeffs.b[0] == coeffs.b[1]) ||
        !(coeffs.alpha[0] == coeffs.alpha[1]))
      throw std::invalid_argument("simulate: mirror coupling needs species-identical coefficients");
    const auto reflected = mirror->apply(initial.u1.v);
    if (reflected != initial.u2.v)
      throw std::invalid_argument(
          "simulate: mirror coupling needs initial data with u2 = u1(sigma_e) exactly");
  }

  SimulationResult res;
  res.trajectory.grid = grid;
  res.trajectory.dt = dt;
  res.trajectory.scenario_id = opts.scenario_id;
  res.trajectory.push({initial.t, initial.u1, initial.u2});
  res.stats.sup_norm = std::max(initial.u1.max_abs(), initial.u2.max_abs());

  const long n_steps = (t_end > initial.t) ? std::lround((t_end - initial.t) / dt) : 0;
  if (n_steps == 0) return res;

  DiffusionSolver solver(grid, dt);
  SystemState state = initial;
  const int cadence = std::max(1, opts.snapshot_every_steps);
  for (long n = 1; n <= n_steps; ++n) {
    StepStats stats;
    SystemState next;
    if (mirror) {
      // Species-1 IMEX update; the tied partner is its exact permutation.
      if (dt > dt_max(state, coeffs, nl))
        throw std::invalid_argument("simulate: dt violates the reaction stability bound");
      auto [f1, f2] = reaction_eval(state, coeffs, nl, state.t + 0.5 * dt);
      ScalarField mid1(grid, 0.0, state.t);
      for (std::size_t i = 0; i < grid->node_count(); ++i)
        if (!grid->is_boundary(i)) mid1.v[i] = state.u1.v[i] + dt * f1.v[i];
      next.t = state.t + dt;
      stats.u1 = solver.solve(mid1, next.u1);
      stats.u2 = SolveStats{};  // one solve per step in mirror mode
      next.u2 = next.u1;
      next.u2.v = mirror->apply(next.u1.v);
    } else {
      auto [stepped, step_stats] = step(state, dt, coeffs, nl, solver);
      next = std::move(stepped);
      stats = step_stats;
    }
    next.t = initial.t + n * dt;  // avoid accumulation drift
    next.u1.time = next.u2.time = next.t;
    state = std::move(next);

    res.stats.steps = n;
    res.stats.max_solver_iterations =
        std::max(res.stats.max_solver_iterations, stats.max_iterations());
    res.stats.max_solver_residual = std::max(res.stats.max_solver_residual, stats.max_residual());
    res.stats.total_solver_iterations += stats.total_iterations();
    const double undershoot = -std::min(0.0, std::min(state.u1.min_value(), state.u2.min_value()));
    res.stats.max_undershoot = std::max(res.stats.max_undershoot, undershoot);
    const double sup = std::max(state.u1.max_abs(), state.u2.max_abs());
    res.stats.sup_norm = std::max(res.stats.sup_norm, sup);
    if (sup > opts.blowup_guard)
      throw std::runtime_error("simulate: blowup guard exceeded at t = " + std::to_string(state.t));

    if (n % cadence == 0 || n == n_steps) res.trajectory.push({state.t, state.u1, state.u2});
  }
  return res;
}

/// Scheme-error scale used by sign-preservation checks:
/// tol_neg = 10 * (dt + h^2) * sup-norm scale.
inline double negative_tolerance(const PolarGrid& grid, double dt, double sup_scale) {
  const double h = grid.h();
  return 10.0 * (dt + h * h) * sup_scale;
}

/// Coefficients of the linearized difference system along e at one time:
/// c_ij = alpha_i u_i for i != j, c_ii = chat_i - alpha_i u_j(sigma_e x),
/// chat_i the s-integral of dv f_i between u_i(x) and u_i(sigma_e x).
struct LinearizedCoefficients {
  Direction e;
  double t = 0.0;
  ScalarField c11, c12, c21, c22;
};

inline LinearizedCoefficients linearized_coefficients(const SystemState& state, Direction e,
                                                      const CoefficientSet& coeffs,
                                                      const std::array<NonlinearitySpec, 2>& nl,
                                                      int quadrature_n = 4) {
  const GridPtr& grid = state.u1.grid;
  const ReflectionMap sigma(*grid, e);
  const std::vector<double> u1_ref = sigma.apply(state.u1.v);
  const std::vector<double> u2_ref = sigma.apply(state.u2.v);
  const GaussLegendre gl(quadrature_n);
  const double t = state.t;

  LinearizedCoefficients out{e, t, ScalarField(grid, 0.0, t), ScalarField(grid, 0.0, t),
                             ScalarField(grid, 0.0, t), ScalarField(grid, 0.0, t)};
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    const double r = grid->radius(i);
    const double a1 = coeffs.alpha_value(0, r, t);
    const double a2 = coeffs.alpha_value(1, r, t);
    const double v1 = state.u1.v[i], v1r = u1_ref[i];
    const double v2 = state.u2.v[i], v2r = u2_ref[i];
    const double chat1 = gl.integrate([&](double s) { return nl[0].dv(t, r, s * v1 + (1.0 - s) * v1r); });
    const double chat2 = gl.integrate([&](double s) { return nl[1].dv(t, r, s * v2 + (1.0 - s) * v2r); });
    out.c12.v[i] = a1 * v1;
    out.c21.v[i] = a2 * v2;
    out.c11.v[i] = chat1 - a1 * v2r;
    out.c22.v[i] = chat2 - a2 * v1r;
  }
  return out;
}

struct ResidualSample {
  double t = 0.0;
  double r1 = 0.0;  // sup residual of the u1^e equation over B(e)
  double r2 = 0.0;
};

/// Residual of the linearized difference system on interior B(e) nodes,
/// with centered time differences over consecutive snapshot triples.
/// The difference fields use the two-species sign convention
/// u1^e = u1 - u1(sigma_e), u2^e = u2(sigma_e) - u2.
inline std::vector<ResidualSample> linear_residual(const Trajectory& traj, Direction e,
                                                   const CoefficientSet& coeffs,
                                                   const std::array<NonlinearitySpec, 2>& nl,
                                                   int quadrature_n = 4) {
  if (traj.snapshots.size() < 3)
    throw std::invalid_argument("linear_residual: need at least 3 snapshots");
  const GridPtr& grid = traj.grid;
  const ReflectionMap sigma(*grid, e);
  const auto mask = half_domain_mask(*grid, e);

  auto difference = [&](const Snapshot& s) {
    const auto r1 = sigma.apply(s.u1.v);
    const auto r2 = sigma.apply(s.u2.v);
    ScalarField d1(grid, 0.0, s.t), d2(grid, 0.0, s.t);
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      d1.v[i] = s.u1.v[i] - r1[i];
      d2.v[i] = r2[i] - s.u2.v[i];
    }
    return std::make_pair(std::move(d1), std::move(d2));
  };

  std::vector<ResidualSample> out;
  for (std::size_t m = 1; m + 1 < traj.snapshots.size(); ++m) {
    const Snapshot& prev = traj.snapshots[m - 1];
    const Snapshot& cur = traj.snapshots[m];
    const Snapshot& next = traj.snapshots[m + 1];
    auto [d1p, d2p] = difference(prev);
    auto [d1c, d2c] = difference(cur);
    auto [d1n, d2n] = difference(next);
    const ScalarField lap1 = laplacian(d1c);
    const ScalarField lap2 = laplacian(d2c);
    SystemState at{cur.u1, cur.u2, cur.t};
    const LinearizedCoefficients C = linearized_coefficients(at, e, coeffs, nl, quadrature_n);
    const double inv_span = 1.0 / (next.t - prev.t);
    ResidualSample sample{cur.t, 0.0, 0.0};
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      if (!mask[i] || grid->is_boundary(i)) continue;
      const double ddt1 = (d1n.v[i] - d1p.v[i]) * inv_span;
      const double ddt2 = (d2n.v[i] - d2p.v[i]) * inv_span;
      const double res1 = ddt1 - lap1.v[i] - C.c11.v[i] * d1c.v[i] - C.c12.v[i] * d2c.v[i];
      const double res2 = ddt2 - lap2.v[i] - C.c21.v[i] * d1c.v[i] - C.c22.v[i] * d2c.v[i];
      sample.r1 = std::max(sample.r1, std::abs(res1));
      sample.r2 = std::max(sample.r2, std::abs(res2));
    }
    out.push_back(sample);
  }
  return out;
}

}  // namespace rdsym
