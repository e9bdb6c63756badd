#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "rdsym/coefficients.hpp"
#include "rdsym/csv_io.hpp"
#include "rdsym/dynamics.hpp"
#include "rdsym/field.hpp"
#include "rdsym/initial_data.hpp"
#include "rdsym/symmetry.hpp"

namespace rdsym {

using Json = nlohmann::ordered_json;

enum class InitialKind { RadialBump, ShiftedBumpPair, File };

struct InitialDataSpec {
  InitialKind kind = InitialKind::ShiftedBumpPair;
  double amplitude = 1.0;
  double offset = 0.3;         // bump-pair center offset along +-e
  double width = 0.2;
  double center_radius = 0.0;  // radial bump only
  std::string path;            // file kind only
};

struct TimeControls {
  double dt = 1e-3;
  double t_end = 1.0;
  int snapshot_every_steps = 10;
};

struct DiagnosticsToggles {
  bool symmetry = true;
  bool omega = true;
  bool steady_state_crosscheck = false;
  std::vector<std::string> probes;  // subset of {harnack, wedge, corner, comparison, quotient}
};

struct Tolerances {
  double extinction = 1e-4;
  double cluster = 0.0;  // 0 means the auto scheme-error scale
  double fss_pass = 1e-2;
  double antipodal_deg = 3.0;
  double hypothesis = 1e-12;
};

/// Everything needed to reproduce one run.  Serializes losslessly to JSON.
struct ScenarioConfig {
  std::string id = "scenario";
  DomainSpec domain{0.0, 1.0};
  int n_r = 32;
  int n_theta = 64;
  bool competitive = true;
  TimeCoefficient a[2]{}, b[2]{};
  SpaceTimeCoefficient alpha[2]{};
  std::string nonlinearity = "logistic";
  std::string coupling = "free";  // "free" | "mirror" (exact tied pair)
  InitialDataSpec initial;
  int direction_index = 0;  // e at angle pi * index / n_theta
  TimeControls time;
  DiagnosticsToggles diagnostics;
  Tolerances tol;
  std::uint64_t seed = 1;

  CoefficientSet coefficient_set() const {
    CoefficientSet c;
    c.a[0] = a[0];
    c.a[1] = a[1];
    c.b[0] = b[0];
    c.b[1] = b[1];
    c.alpha[0] = alpha[0];
    c.alpha[1] = alpha[1];
    c.competitive = competitive;
    c.domain = domain;
    return c;
  }

  Direction direction(const PolarGrid& grid) const {
    return grid_aligned_direction(grid, direction_index);
  }
};

namespace cfg {

inline Json time_coefficient_to_json(const TimeCoefficient& c) {
  return Json{{"c0", c.c0}, {"c1", c.c1}, {"omega", c.omega}, {"phase", c.phase}};
}

inline TimeCoefficient time_coefficient_from_json(const Json& j, std::vector<std::string>& errs,
                                                  const std::string& where) {
  TimeCoefficient c;
  static const std::set<std::string> keys{"c0", "c1", "omega", "phase"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) errs.push_back(where + ": unknown key '" + it.key() + "'");
  c.c0 = j.value("c0", 0.0);
  c.c1 = j.value("c1", 0.0);
  c.omega = j.value("omega", 0.0);
  c.phase = j.value("phase", 0.0);
  return c;
}

inline Json space_time_to_json(const SpaceTimeCoefficient& c) {
  Json j = time_coefficient_to_json(c.time_part);
  if (c.modulated) j["radial"] = Json{{"amp", c.radial.amp}, {"freq", c.radial.freq}};
  return j;
}

inline SpaceTimeCoefficient space_time_from_json(const Json& j, std::vector<std::string>& errs,
                                                 const std::string& where) {
  SpaceTimeCoefficient c;
  Json base = j;
  if (j.contains("radial")) {
    const Json& r = j.at("radial");
    for (auto it = r.begin(); it != r.end(); ++it)
      if (it.key() != "amp" && it.key() != "freq")
        errs.push_back(where + ".radial: unknown key '" + it.key() + "'");
    c.radial.amp = r.value("amp", 0.0);
    c.radial.freq = r.value("freq", 1.0);
    c.modulated = true;
    base.erase("radial");
  }
  c.time_part = time_coefficient_from_json(base, errs, where);
  return c;
}

}  // namespace cfg

inline Json config_to_json(const ScenarioConfig& c) {
  Json j;
  j["id"] = c.id;
  j["domain"] = {{"inner_radius", c.domain.inner_radius}, {"outer_radius", c.domain.outer_radius}};
  j["grid"] = {{"n_r", c.n_r}, {"n_theta", c.n_theta}};
  j["mode"] = c.competitive ? "competitive" : "general";
  Json coeffs;
  coeffs["a1"] = cfg::time_coefficient_to_json(c.a[0]);
  coeffs["a2"] = cfg::time_coefficient_to_json(c.a[1]);
  coeffs["b1"] = cfg::time_coefficient_to_json(c.b[0]);
  coeffs["b2"] = cfg::time_coefficient_to_json(c.b[1]);
  coeffs["alpha1"] = cfg::space_time_to_json(c.alpha[0]);
  coeffs["alpha2"] = cfg::space_time_to_json(c.alpha[1]);
  j["coefficients"] = coeffs;
  j["nonlinearity"] = c.nonlinearity;
  j["coupling"] = c.coupling;
  Json init;
  switch (c.initial.kind) {
    case InitialKind::RadialBump:
      init = {{"kind", "radial_bump"},
              {"amplitude", c.initial.amplitude},
              {"center_radius", c.initial.center_radius},
              {"width", c.initial.width}};
      break;
    case InitialKind::ShiftedBumpPair:
      init = {{"kind", "shifted_bump_pair"},
              {"amplitude", c.initial.amplitude},
              {"offset", c.initial.offset},
              {"width", c.initial.width}};
      break;
    case InitialKind::File:
      init = {{"kind", "file"}, {"path", c.initial.path}};
      break;
  }
  j["initial_data"] = init;
  j["direction_index"] = c.direction_index;
  j["time"] = {{"dt", c.time.dt},
               {"t_end", c.time.t_end},
               {"snapshot_every_steps", c.time.snapshot_every_steps}};
  j["diagnostics"] = {{"symmetry", c.diagnostics.symmetry},
                      {"omega", c.diagnostics.omega},
                      {"steady_state_crosscheck", c.diagnostics.steady_state_crosscheck},
                      {"probes", c.diagnostics.probes}};
  j["tolerances"] = {{"extinction", c.tol.extinction},
                     {"cluster", c.tol.cluster},
                     {"fss_pass", c.tol.fss_pass},
                     {"antipodal_deg", c.tol.antipodal_deg},
                     {"hypothesis", c.tol.hypothesis}};
  j["seed"] = c.seed;
  return j;
}

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  Json checks = Json::object();

  Json to_json() const {
    return Json{
        {"valid", valid}, {"errors", errors}, {"warnings", warnings}, {"checks", checks}};
  }
};

/// Structural parse with unknown-key detection.  Field-level problems land
/// in `report.errors`; the returned config is usable only when valid.
inline ScenarioConfig config_from_json(const Json& j, ValidationReport& report) {
  ScenarioConfig c;
  auto& errs = report.errors;
  static const std::set<std::string> top{"id",           "domain",       "grid",
                                         "mode",         "coefficients", "nonlinearity",
                                         "coupling",     "initial_data", "direction_index",
                                         "time",         "diagnostics",  "tolerances",
                                         "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!top.count(it.key())) errs.push_back("unknown top-level key '" + it.key() + "'");

  c.id = j.value("id", std::string("scenario"));
  if (j.contains("domain")) {
    const double a1 = j["domain"].value("inner_radius", 0.0);
    const double a2 = j["domain"].value("outer_radius", 1.0);
    if (!(a1 >= 0.0) || !(a2 > a1) || !std::isfinite(a2))
      errs.push_back("domain: need 0 <= inner_radius < outer_radius < inf");
    else
      c.domain = DomainSpec(a1, a2);
  }
  if (j.contains("grid")) {
    c.n_r = j["grid"].value("n_r", 32);
    c.n_theta = j["grid"].value("n_theta", 64);
  }
  if (c.n_r < 8) errs.push_back("grid.n_r: must be >= 8");
  if (c.n_theta < 16 || c.n_theta % 2 != 0) errs.push_back("grid.n_theta: must be even and >= 16");

  const std::string mode = j.value("mode", std::string("competitive"));
  if (mode != "competitive" && mode != "general")
    errs.push_back("mode: must be 'competitive' or 'general'");
  c.competitive = mode == "competitive";

  if (j.contains("coefficients")) {
    const Json& k = j["coefficients"];
    static const std::set<std::string> names{"a1", "a2", "b1", "b2", "alpha1", "alpha2"};
    for (auto it = k.begin(); it != k.end(); ++it)
      if (!names.count(it.key())) errs.push_back("coefficients: unknown key '" + it.key() + "'");
    if (k.contains("a1")) c.a[0] = cfg::time_coefficient_from_json(k["a1"], errs, "a1");
    if (k.contains("a2")) c.a[1] = cfg::time_coefficient_from_json(k["a2"], errs, "a2");
    if (k.contains("b1")) c.b[0] = cfg::time_coefficient_from_json(k["b1"], errs, "b1");
    if (k.contains("b2")) c.b[1] = cfg::time_coefficient_from_json(k["b2"], errs, "b2");
    if (k.contains("alpha1")) c.alpha[0] = cfg::space_time_from_json(k["alpha1"], errs, "alpha1");
    if (k.contains("alpha2")) c.alpha[1] = cfg::space_time_from_json(k["alpha2"], errs, "alpha2");
  }

  c.nonlinearity = j.value("nonlinearity", std::string("logistic"));
  if (c.nonlinearity != "logistic") errs.push_back("nonlinearity: only 'logistic' is built in");

  c.coupling = j.value("coupling", std::string("free"));
  if (c.coupling != "free" && c.coupling != "mirror")
    errs.push_back("coupling: must be 'free' or 'mirror'");

  if (j.contains("initial_data")) {
    const Json& init = j["initial_data"];
    const std::string kind = init.value("kind", std::string("shifted_bump_pair"));
    static const std::set<std::string> ik{"kind",   "amplitude",     "offset",
                                          "width",  "center_radius", "path"};
    for (auto it = init.begin(); it != init.end(); ++it)
      if (!ik.count(it.key())) errs.push_back("initial_data: unknown key '" + it.key() + "'");
    c.initial.amplitude = init.value("amplitude", 1.0);
    c.initial.offset = init.value("offset", 0.3);
    c.initial.width = init.value("width", 0.2);
    c.initial.center_radius = init.value("center_radius", 0.0);
    c.initial.path = init.value("path", std::string());
    if (kind == "radial_bump")
      c.initial.kind = InitialKind::RadialBump;
    else if (kind == "shifted_bump_pair")
      c.initial.kind = InitialKind::ShiftedBumpPair;
    else if (kind == "file")
      c.initial.kind = InitialKind::File;
    else
      errs.push_back("initial_data.kind: unknown kind '" + kind + "'");
    if (c.initial.kind == InitialKind::File && c.initial.path.empty())
      errs.push_back("initial_data: file kind requires a path");
    if (!(c.initial.width > 0.0)) errs.push_back("initial_data.width: must be positive");
  }

  c.direction_index = j.value("direction_index", 0);
  if (c.direction_index < 0 || c.direction_index >= 2 * c.n_theta)
    errs.push_back("direction_index: must lie in [0, 2*n_theta)");

  if (j.contains("time")) {
    const Json& t = j["time"];
    c.time.dt = t.value("dt", 1e-3);
    c.time.t_end = t.value("t_end", 1.0);
    c.time.snapshot_every_steps = t.value("snapshot_every_steps", 10);
  }
  if (!(c.time.dt > 0.0)) errs.push_back("time.dt: must be positive");
  if (c.time.t_end < 0.0) errs.push_back("time.t_end: must be nonnegative");
  if (c.time.snapshot_every_steps < 1) errs.push_back("time.snapshot_every_steps: must be >= 1");

  if (j.contains("diagnostics")) {
    const Json& d = j["diagnostics"];
    c.diagnostics.symmetry = d.value("symmetry", true);
    c.diagnostics.omega = d.value("omega", true);
    c.diagnostics.steady_state_crosscheck = d.value("steady_state_crosscheck", false);
    if (d.contains("probes")) {
      static const std::set<std::string> known{"harnack", "wedge", "corner", "comparison",
                                               "quotient"};
      for (const auto& p : d["probes"]) {
        const std::string name = p.get<std::string>();
        if (!known.count(name))
          errs.push_back("diagnostics.probes: unknown probe '" + name + "'");
        else
          c.diagnostics.probes.push_back(name);
      }
    }
  }

  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    c.tol.extinction = t.value("extinction", 1e-4);
    c.tol.cluster = t.value("cluster", 0.0);
    c.tol.fss_pass = t.value("fss_pass", 1e-2);
    c.tol.antipodal_deg = t.value("antipodal_deg", 3.0);
    c.tol.hypothesis = t.value("hypothesis", 1e-12);
    for (const double v : {c.tol.extinction, c.tol.fss_pass, c.tol.antipodal_deg, c.tol.hypothesis})
      if (!(v > 0.0)) {
        errs.push_back("tolerances: all referenced tolerances must be positive");
        break;
      }
    if (c.tol.cluster < 0.0) errs.push_back("tolerances.cluster: must be >= 0 (0 = auto)");
  }

  c.seed = j.value("seed", std::uint64_t{1});
  report.valid = report.errors.empty();
  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path, ValidationReport& report) {
  std::ifstream in(path);
  if (!in) {
    report.errors.push_back("cannot open config file " + path.string());
    report.valid = false;
    return {};
  }
  Json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    report.errors.push_back(std::string("JSON parse error: ") + ex.what());
    report.valid = false;
    return {};
  }
  return config_from_json(j, report);
}

/// Builds the configured initial pair on the given grid.
inline std::pair<ScalarField, ScalarField> build_initial_data(const ScenarioConfig& c,
                                                              const GridPtr& grid) {
  switch (c.initial.kind) {
    case InitialKind::RadialBump: {
      ScalarField u = radial_bump(grid, c.initial.amplitude, c.initial.center_radius,
                                  c.initial.width);
      return {u, u};
    }
    case InitialKind::ShiftedBumpPair:
      return shifted_bump_pair(grid, c.initial.amplitude, c.initial.offset, c.initial.width,
                               c.direction(*grid));
    case InitialKind::File: {
      const Snapshot snap = read_snapshot_csv(c.initial.path, grid);
      return {snap.u1, snap.u2};
    }
  }
  throw std::logic_error("build_initial_data: unreachable");
}

/// Static semantic checks: the (h2) coupling floor in competitive mode,
/// the built-in zero condition f_i(.,.,0) = 0, the (h0) ordering of the
/// constructed initial data (with the strict/non-strict distinction), and
/// the explicit-reaction dt bound.
inline ValidationReport validate_config(const ScenarioConfig& c, ValidationReport report = {}) {
  const CoefficientSet coeffs = c.coefficient_set();

  Json h2;
  h2["alpha_floor"] = coeffs.alpha_floor();
  h2["alpha_cap"] = coeffs.alpha_cap();
  if (c.competitive && !(coeffs.alpha_floor() > 0.0)) {
    h2["status"] = "violation";
    report.errors.push_back("(h2) floor: competitive mode requires inf alpha_i > 0, floor is " +
                            std::to_string(coeffs.alpha_floor()));
  } else {
    h2["status"] = "pass";
  }
  report.checks["h2"] = h2;

  // Built-in logistic kinds satisfy f_i(t, r, 0) = 0 identically.
  report.checks["h1_zero"] = (c.nonlinearity == "logistic") ? "pass" : "unchecked";

  if (report.errors.empty()) {
    try {
      auto grid = make_grid(c.domain, c.n_r, c.n_theta);
      auto [u1, u2] = build_initial_data(c, grid);
      const Direction e = c.direction(*grid);
      const HypothesisCheck h0 = check_reflection_hypothesis(u1, u2, e, c.tol.hypothesis);
      Json jh0;
      jh0["holds"] = h0.holds;
      jh0["strict"] = h0.strict;
      jh0["violation"] = h0.violation;
      jh0["direction_angle"] = e.angle;
      report.checks["h0"] = jh0;
      if (!h0.holds)
        report.warnings.push_back("(h0) violated with magnitude " + std::to_string(h0.violation));
      else if (!h0.strict)
        report.warnings.push_back(
            "(h0) holds but not strictly: theorem hypothesis requires "
            "not-identically-symmetric data");

      if (c.coupling == "mirror") {
        if (!(c.a[0] == c.a[1]) || !(c.b[0] == c.b[1]) || !(c.alpha[0] == c.alpha[1]))
          report.errors.push_back("coupling: mirror needs species-identical coefficients");
        const ReflectionMap sigma(*grid, e);
        if (!sigma.exact())
          report.errors.push_back("coupling: mirror needs a grid-aligned direction");
        else if (sigma.apply(u1.v) != u2.v)
          report.errors.push_back("coupling: mirror needs initial data with u2 = u1(sigma_e)");
      }

      const auto nl = make_logistic_pair(coeffs);
      SystemState s0 = make_state(grid, u1, u2, 0.0);
      const double bound = dt_max(s0, coeffs, nl);
      report.checks["dt_bound"] = bound;
      if (c.time.dt > bound)
        report.errors.push_back("time.dt " + std::to_string(c.time.dt) +
                                " exceeds the reaction stability bound " + std::to_string(bound));
    } catch (const std::exception& ex) {
      report.errors.push_back(std::string("initial data: ") + ex.what());
    }
  }

  report.valid = report.errors.empty();
  return report;
}

}  // namespace rdsym
