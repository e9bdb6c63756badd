#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rdsym/asymptotics.hpp"
#include "rdsym/probes.hpp"
#include "rdsym/scenario.hpp"

namespace rdsym {

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config error, 3 solver failure, 4 degenerate diagnostics
  Json report;
};

namespace rep {

inline Json axis_to_json(const AxisReport& a) {
  return Json{{"axis_angle", a.axis.angle},
              {"moment", a.moment},
              {"degenerate", a.degenerate},
              {"fss_deviation", a.fss_deviation},
              {"monotonicity_violation", a.monotonicity_violation}};
}

inline Json harnack_to_json(const HarnackReport& h) {
  return Json{{"kappa", h.kappa},
              {"inf", h.inf_value},
              {"avg", h.avg_value},
              {"p_exp", h.p_exp},
              {"nodes", h.nodes}};
}

inline Json wedge_to_json(const WedgeSlopeReport& w) {
  Json j;
  j["delta"] = w.delta;
  for (int sp = 0; sp < 2; ++sp) {
    j[sp == 0 ? "u1" : "u2"] = Json{{"mu", w.species[sp].mu},
                                    {"eps", w.species[sp].eps},
                                    {"degenerate", w.species[sp].degenerate}};
  }
  return j;
}

inline Json corner_to_json(const CornerReport& c) {
  Json j;
  for (int sp = 0; sp < 2; ++sp) {
    Json arr = Json::array();
    for (const CornerCurvature& cc : c.species[sp]) {
      arr.push_back(Json{{"corner_x", cc.frame.corner.x},
                         {"corner_y", cc.frame.corner.y},
                         {"inner_ring", cc.frame.inner_ring},
                         {"d_ss", cc.d_ss},
                         {"d_stst", cc.d_stst},
                         {"rho", cc.rho},
                         {"antisymmetry_gap", cc.antisymmetry_gap}});
    }
    j[sp == 0 ? "u1" : "u2"] = Json{{"corners", arr},
                                    {"sign_pattern", c.sign_pattern[sp]},
                                    {"degenerate", c.degenerate[sp]}};
  }
  return j;
}

inline std::string verdict_name(bool pass, bool degenerate) {
  if (degenerate) return "degenerate";
  return pass ? "pass" : "fail";
}

}  // namespace rep

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

}  // namespace detail

/// Executes one configured scenario end to end: simulate, serialize
/// snapshots, run the toggled diagnostics, and write report.json plus
/// plot-ready aggregates into out_dir.  Deterministic for a fixed
/// (config, seed).
inline RunOutcome run_scenario(const ScenarioConfig& c, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  RunOutcome out;
  Json& report = out.report;
  report["scenario"] = config_to_json(c);

  ValidationReport validation = validate_config(c);
  report["validation"] = validation.to_json();
  Json manifest;
  manifest["report"] = "report.json";
  manifest["snapshots"] = Json::array();
  manifest["aggregates"] = Json::array();

  fs::create_directories(out_dir);
  auto finalize = [&](int code) {
    report["verdicts"]["exit_code"] = code;
    report["manifest"] = manifest;
    detail::write_text(out_dir / "report.json", report.dump(2) + "\n");
    detail::write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    out.exit_code = code;
    return out;
  };

  report["verdicts"] = Json::object();
  if (!validation.valid) return finalize(2);

  // --- simulate ---------------------------------------------------------
  auto grid = make_grid(c.domain, c.n_r, c.n_theta);
  const Direction e = c.direction(*grid);
  const CoefficientSet coeffs = c.coefficient_set();
  const auto nl = make_logistic_pair(coeffs);
  auto [u1, u2] = build_initial_data(c, grid);
  SystemState s0 = make_state(grid, u1, u2, 0.0);

  SimulationResult sim;
  try {
    SimulateOptions opts;
    opts.snapshot_every_steps = c.time.snapshot_every_steps;
    opts.scenario_id = c.id;
    opts.mirror_coupling = c.coupling == "mirror";
    opts.mirror_direction = e;
    sim = simulate(s0, coeffs, nl, c.time.t_end, c.time.dt, opts);
  } catch (const std::exception& ex) {
    report["scheme"] = Json{{"status", "solver_failure"}, {"error", ex.what()}};
    return finalize(3);
  }

  const double tol_neg = negative_tolerance(*grid, c.time.dt, sim.stats.sup_norm);
  report["scheme"] = Json{{"status", "ok"},
                          {"coupling", c.coupling},
                          {"steps", sim.stats.steps},
                          {"dt", c.time.dt},
                          {"sup_norm", sim.stats.sup_norm},
                          {"max_undershoot", sim.stats.max_undershoot},
                          {"tol_neg", tol_neg},
                          {"solver", Json{{"total_iterations", sim.stats.total_solver_iterations},
                                          {"max_iterations", sim.stats.max_solver_iterations},
                                          {"max_residual", sim.stats.max_solver_residual}}}};

  // --- snapshots + manifest ---------------------------------------------
  const fs::path snap_dir = out_dir / "snapshots";
  fs::create_directories(snap_dir);
  for (std::size_t i = 0; i < sim.trajectory.snapshots.size(); ++i) {
    const Snapshot& s = sim.trajectory.snapshots[i];
    const std::string name = snapshot_filename(i, s.t);
    write_snapshot_csv(snap_dir / name, s);
    manifest["snapshots"].push_back(Json{{"index", i}, {"t", s.t}, {"file", "snapshots/" + name}});
  }

  // --- symmetry diagnostics ----------------------------------------------
  const fs::path agg_dir = out_dir / "aggregates";
  fs::create_directories(agg_dir);
  Json verdicts;

  if (c.diagnostics.symmetry) {
    std::string dev_csv = "t,fss_u1,fss_u2,radial_u1,radial_u2\n";
    std::string axis_csv = "t,angle_u1,moment_u1,degenerate_u1,angle_u2,moment_u2,degenerate_u2\n";
    for (const Snapshot& s : sim.trajectory.snapshots) {
      const AxisReport a1 = analyze_axis(s.u1);
      const AxisReport a2 = analyze_axis(s.u2);
      char line[256];
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t, a1.fss_deviation,
                    a2.fss_deviation, radial_deviation(s.u1), radial_deviation(s.u2));
      dev_csv += line;
      std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%d,%.9g,%.9g,%d\n", s.t, a1.axis.angle,
                    a1.moment, a1.degenerate ? 1 : 0, a2.axis.angle, a2.moment,
                    a2.degenerate ? 1 : 0);
      axis_csv += line;
    }
    detail::write_text(agg_dir / "deviation_vs_time.csv", dev_csv);
    detail::write_text(agg_dir / "axis_angle_vs_time.csv", axis_csv);
    manifest["aggregates"].push_back("aggregates/deviation_vs_time.csv");
    manifest["aggregates"].push_back("aggregates/axis_angle_vs_time.csv");

    // Sign preservation of the difference pair over the whole run.
    double min_d1 = 0.0, min_d2 = 0.0;
    const auto half = half_domain_mask(*grid, e);
    for (const Snapshot& s : sim.trajectory.snapshots) {
      const ReflectionDifference d = reflection_difference({s.u1, s.u2, s.t}, e);
      for (std::size_t i = 0; i < grid->node_count(); ++i) {
        if (!half[i]) continue;
        min_d1 = std::min(min_d1, d.d1.v[i]);
        min_d2 = std::min(min_d2, d.d2.v[i]);
      }
    }
    const bool signs_ok = min_d1 >= -tol_neg && min_d2 >= -tol_neg;
    report["difference_sign"] = Json{{"min_u1e", min_d1},
                                     {"min_u2e", min_d2},
                                     {"tol_neg", tol_neg},
                                     {"verdict", signs_ok ? "pass" : "fail"}};
    verdicts["difference_sign"] = signs_ok ? "pass" : "fail";
  } else {
    report["difference_sign"] = Json{{"status", "skipped"}};
  }

  // --- omega limit extraction ---------------------------------------------
  if (c.diagnostics.omega && c.diagnostics.symmetry) {
    Json omega;
    try {
      const double cluster_tol =
          c.tol.cluster > 0.0
              ? c.tol.cluster
              : 10.0 * (c.time.dt + grid->h() * grid->h()) * std::max(1.0, sim.stats.sup_norm);
      const LimitProfileSet set =
          extract_limit_profiles(sim.trajectory, 0.2, cluster_tol, c.tol.extinction);
      omega["status"] = "ok";
      omega["cluster_tol"] = cluster_tol;
      omega["convergence_indicator"] = set.convergence_indicator;
      omega["tail_snapshots"] = set.tail_snapshots;

      const double fss_tol = c.tol.fss_pass;
      const double anti_tol = c.tol.antipodal_deg * std::numbers::pi / 180.0;
      bool any_degenerate = false, all_pass = true, any_rep = false;
      Json reps = Json::array();
      for (const LimitRepresentative& r : set.representatives) {
        any_rep = true;
        const AxisReport a1 = analyze_axis(r.snapshot.u1);
        const AxisReport a2 = analyze_axis(r.snapshot.u2);
        Json jr;
        jr["t"] = r.snapshot.t;
        jr["members"] = r.members;
        jr["cluster_radius"] = r.cluster_radius;
        jr["classification"] = to_string(r.classification);
        jr["u1"] = rep::axis_to_json(a1);
        jr["u2"] = rep::axis_to_json(a2);
        jr["sup_u1"] = r.snapshot.u1.max_abs();
        jr["sup_u2"] = r.snapshot.u2.max_abs();
        jr["radial_deviation_u1"] = radial_deviation(r.snapshot.u1);
        jr["radial_deviation_u2"] = radial_deviation(r.snapshot.u2);
        if (a1.degenerate || a2.degenerate) {
          any_degenerate = true;
          jr["antipodality"] = Json{{"verdict", "degenerate"}};
        } else {
          const double gap = antipodality_gap(a1.axis, a2.axis);
          const double scale = std::max(r.snapshot.u1.max_abs(), r.snapshot.u2.max_abs());
          const bool ok = gap < anti_tol && a1.fss_deviation < fss_tol &&
                          a2.fss_deviation < fss_tol &&
                          a1.monotonicity_violation < fss_tol * scale &&
                          a2.monotonicity_violation < fss_tol * scale;
          all_pass = all_pass && ok;
          jr["antipodality"] =
              Json{{"verdict", ok ? "pass" : "fail"}, {"gap_radians", gap}};
        }
        reps.push_back(jr);
      }
      omega["representatives"] = reps;
      std::string verdict = "inconclusive";
      if (!any_rep)
        verdict = "inconclusive";
      else if (any_degenerate)
        verdict = "degenerate";
      else
        verdict = all_pass ? "pass" : "fail";
      verdicts["antipodality"] = verdict;
      report["omega"] = omega;
    } catch (const std::exception& ex) {
      report["omega"] = Json{{"status", "error"}, {"error", ex.what()}};
      verdicts["antipodality"] = "inconclusive";
    }
  } else {
    report["omega"] = Json{{"status", "skipped"}};
  }

  // --- semi-trivial steady-state cross-check ------------------------------
  if (c.diagnostics.steady_state_crosscheck) {
    Json ss;
    const Snapshot& last = sim.trajectory.snapshots.back();
    const ProfileClass cls = classify_profile(last.u1, last.u2, c.tol.extinction);
    ss["classification"] = to_string(cls);
    if (cls == ProfileClass::Semitrivial1 || cls == ProfileClass::Semitrivial2) {
      const int survivor = (cls == ProfileClass::Semitrivial1) ? 0 : 1;
      if (!c.a[survivor].is_constant() || !c.b[survivor].is_constant()) {
        ss["status"] = "inconclusive_nonautonomous";
        verdicts["steady_state"] = "inconclusive";
      } else {
        try {
          const SteadyProfile prof = radial_steady_state(c.a[survivor].c0, c.b[survivor].c0,
                                                         c.domain, c.n_r);
          const ScalarField target = lift_radial(grid, prof.profile);
          const ScalarField& got = survivor == 0 ? last.u1 : last.u2;
          double err = 0.0;
          for (std::size_t i = 0; i < got.size(); ++i)
            err = std::max(err, std::abs(got.v[i] - target.v[i]));
          const double rel = err / std::max(target.max_abs(), 1e-300);
          ss["status"] = "ok";
          ss["survivor"] = survivor + 1;
          ss["lambda1"] = prof.lambda1;
          ss["subcritical"] = prof.subcritical;
          ss["relative_sup_error"] = rel;
          ss["radial_deviation"] = radial_deviation(got);
          write_radial_csv(agg_dir / "steady_profile.csv", prof.profile);
          manifest["aggregates"].push_back("aggregates/steady_profile.csv");
          verdicts["steady_state"] = rel < 1e-2 ? "pass" : "fail";
        } catch (const std::exception& ex) {
          ss["status"] = "error";
          ss["error"] = ex.what();
          verdicts["steady_state"] = "inconclusive";
        }
      }
    } else {
      ss["status"] = "not_semitrivial";
      verdicts["steady_state"] = "inconclusive";
    }
    report["steady_state_crosscheck"] = ss;
  } else {
    report["steady_state_crosscheck"] = Json{{"status", "skipped"}};
  }

  // --- probes --------------------------------------------------------------
  Json probes;
  for (const char* name : {"harnack", "wedge", "corner", "comparison", "quotient"})
    probes[name] = Json{{"status", "skipped"}};
  const double span = sim.trajectory.t_end() - sim.trajectory.t_begin();
  for (const std::string& probe : c.diagnostics.probes) {
    try {
      if (probe == "harnack") {
        const double width = std::min(1.0, span);
        const TrajectoryView view = rescale_window(sim.trajectory, sim.trajectory.t_end(), width);
        std::vector<std::uint8_t> D(grid->node_count(), 0);
        const double delta = 0.2 * c.domain.half_gap();
        for (std::size_t i = 0; i < grid->node_count(); ++i)
          if (grid->boundary_distance(i) > delta) D[i] = 1;
        Json arr;
        for (int sp = 0; sp < 2; ++sp) {
          const char* key = sp == 0 ? "u1" : "u2";
          try {
            arr[key] = rep::harnack_to_json(harnack_ratio(view, sp, D));
          } catch (const std::exception& ex) {
            arr[key] = Json{{"status", "error"}, {"error", ex.what()}};
          }
        }
        arr["status"] = "ok";
        probes["harnack"] = arr;
      } else if (probe == "wedge") {
        const double width = std::min(1.0, span);
        const TrajectoryView view = rescale_window(sim.trajectory, sim.trajectory.t_end(), width);
        const WedgeSlopeReport w =
            wedge_and_slope_probe(view, e, 0.1 * c.domain.half_gap(), tol_neg);
        Json jw = rep::wedge_to_json(w);
        jw["status"] = "ok";
        probes["wedge"] = jw;
        if (w.species[0].degenerate || w.species[1].degenerate)
          verdicts["wedge"] = "degenerate";
        else
          verdicts["wedge"] = (w.species[0].mu > 0 && w.species[1].mu > 0) ? "pass" : "fail";
      } else if (probe == "corner") {
        const Snapshot& last = sim.trajectory.snapshots.back();
        const CornerReport cr = corner_curvature_probe({last.u1, last.u2, last.t}, e);
        Json jc = rep::corner_to_json(cr);
        jc["status"] = "ok";
        probes["corner"] = jc;
        if (cr.degenerate[0] || cr.degenerate[1])
          verdicts["corner"] = "degenerate";
        else
          verdicts["corner"] = (cr.sign_pattern[0] && cr.sign_pattern[1]) ? "pass" : "fail";
      } else if (probe == "comparison") {
        const double u_bound =
            std::max({sim.stats.sup_norm, c.a[0].upper() / std::max(c.b[0].lower(), 1e-9),
                      c.a[1].upper() / std::max(c.b[1].lower(), 1e-9)});
        const double beta0 =
            std::min(20.0, std::max({c.a[0].sup_abs(), c.a[1].sup_abs()}) +
                               2.0 * std::max(c.b[0].sup_abs(), c.b[1].sup_abs()) * u_bound +
                               coeffs.alpha_cap() * u_bound);
        const double r = 0.5 * c.domain.half_gap();
        const auto c_worst = [beta0](Point, double) { return beta0; };
        const double ang = e.angle + 0.25 * std::numbers::pi;
        const Point x_star{c.domain.outer_radius * std::cos(ang),
                           c.domain.outer_radius * std::sin(ang)};
        const Point y_int = (1.0 - r / c.domain.outer_radius) * x_star;
        const ComparisonReport interior =
            comparison_residual(grid, ComparisonKind::Interior, e, y_int, r, 1.0, beta0, c_worst);
        const Point corner = corner_frames(*grid, e).front().corner;
        const Point y_cor = corner + r * corner_frames(*grid, e).front().normal;
        const ComparisonReport corner_rep =
            comparison_residual(grid, ComparisonKind::Corner, e, y_cor, r, 1.0, beta0, c_worst);
        probes["comparison"] =
            Json{{"status", "ok"},
                 {"beta0", beta0},
                 {"radius", r},
                 {"interior",
                  Json{{"max_residual", interior.max_residual}, {"points", interior.points},
                       {"gamma", interior.decay_rate}}},
                 {"corner", Json{{"max_residual", corner_rep.max_residual},
                                 {"points", corner_rep.points},
                                 {"theta", corner_rep.decay_rate}}}};
      } else if (probe == "quotient") {
        const double k = std::max(2.0 * c.time.dt * c.time.snapshot_every_steps,
                                  std::min(1.0, 0.1 * span));
        const double t_cut = sim.trajectory.t_end() - 0.2 * span;
        const std::vector<double> t_list{t_cut, 0.5 * (t_cut + sim.trajectory.t_end() - k),
                                         sim.trajectory.t_end() - k};
        // Probe the dominant species; an extinct one cannot stay positive.
        const Snapshot& last = sim.trajectory.snapshots.back();
        const int species = last.u1.max_abs() >= last.u2.max_abs() ? 0 : 1;
        const QuotientReport q = normalized_quotient_probe(sim.trajectory, species, t_list, k);
        Json samples = Json::array();
        for (const QuotientSample& s : q.samples)
          samples.push_back(Json{{"t_n", s.t_n},
                                 {"beta_n", s.beta_n},
                                 {"c_sup", s.c_sup},
                                 {"c_fit", s.c_fit},
                                 {"theta_fit", s.theta_fit}});
        Json ratios = Json::array();
        for (const auto& [tau, ratio] : q.unit_ratios)
          ratios.push_back(Json{{"tau", tau}, {"ratio", ratio}});
        probes["quotient"] = Json{{"status", "ok"},
                                  {"species", species + 1},
                                  {"samples", samples},
                                  {"unit_ratios", ratios}};
      }
    } catch (const std::exception& ex) {
      probes[probe] = Json{{"status", "error"}, {"error", ex.what()}};
      verdicts[probe] = "inconclusive";
    }
  }
  report["probes"] = probes;

  int code = 0;
  for (const auto& [key, value] : verdicts.items()) {
    (void)key;
    const std::string v = value.get<std::string>();
    if (v == "degenerate" || v == "inconclusive") code = 4;
  }
  for (auto& [key, value] : verdicts.items()) report["verdicts"][key] = value;
  return finalize(code);
}

}  // namespace rdsym
