// Acceptance suite: runs every gate criterion end to end at its pinned
// tolerance and prints one PASS/FAIL line per criterion with the measured
// numbers.  Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rdsym/asymptotics.hpp"
#include "rdsym/dynamics.hpp"
#include "rdsym/initial_data.hpp"
#include "rdsym/operators.hpp"
#include "rdsym/probes.hpp"
#include "rdsym/radial.hpp"
#include "rdsym/runner.hpp"
#include "rdsym/scenario.hpp"
#include "rdsym/symmetry.hpp"

namespace fs = std::filesystem;
using namespace rdsym;

namespace {

int g_failures = 0;

void record(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] %2d. %-34s %s  (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Independent oracle: J0 power series and its first zero by bisection.
double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < 80; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j0(lo) * bessel_j0(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_discretization_order() {
  Timer timer;
  std::vector<double> harmonic_err, quad_err;
  for (const int n : {32, 64, 128}) {
    auto grid = make_grid(DomainSpec(0.0, 1.0), n, 2 * n);
    ScalarField h = sample_field(grid, [](Point p) { return p.x * p.x - p.y * p.y; });
    ScalarField q = sample_field(grid, [](Point p) { return p.x * p.x + p.y * p.y; });
    const ScalarField lap_h = laplacian(h);
    const ScalarField lap_q = laplacian(q);
    double eh = 0.0, eq = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      if (!grid->is_interior(i)) continue;
      eh = std::max(eh, std::abs(lap_h.v[i]));
      eq = std::max(eq, std::abs(lap_q.v[i] - 4.0));
    }
    harmonic_err.push_back(eh);
    quad_err.push_back(eq);
  }
  const double r01 = harmonic_err[0] / harmonic_err[1];
  const double r12 = harmonic_err[1] / harmonic_err[2];
  const bool ratios_ok = std::abs(r01 - 4.0) <= 0.8 && std::abs(r12 - 4.0) <= 0.8;
  // The stencil reproduces quadratics exactly, so r^2 is checked at the
  // exactness floor rather than by an error ratio.
  const bool quad_ok = quad_err[0] < 1e-9 && quad_err[1] < 1e-9 && quad_err[2] < 1e-9;
  record(1, "discretization order", ratios_ok && quad_ok,
         fmt("harmonic ratios %.2f, %.2f (need 4+-0.8); r^2 error <= %.1e (exact stencil)", r01,
             r12, std::max({quad_err[0], quad_err[1], quad_err[2]})),
         timer.seconds());
}

void criterion_2_eigenvalue_fidelity() {
  Timer timer;
  const double j01 = bessel_j0_first_zero();
  const double lambda_exact = j01 * j01;
  const double lambda = lambda1_extrapolated(DomainSpec(0.0, 1.0), 256);
  const double rel = std::abs(lambda / lambda_exact - 1.0);

  const double base = principal_eigenpair(DomainSpec(0.0, 1.0), 128).lambda;
  const double dbl = principal_eigenpair(DomainSpec(0.0, 2.0), 128).lambda;
  const double scale_rel = std::abs(dbl / (base / 4.0) - 1.0);

  record(2, "eigenvalue fidelity", rel <= 0.01 && scale_rel <= 0.001,
         fmt("lambda1=%.6f vs oracle %.6f (rel %.2e <= 1e-2); scaling rel %.2e <= 1e-3", lambda,
             lambda_exact, rel, scale_rel),
         timer.seconds());
}

void criterion_3_decay_rate() {
  Timer timer;
  const DomainSpec dom(0.0, 1.0);
  const int n_r = 64;
  auto grid = make_grid(dom, n_r, 32);
  const Eigenpair eig = principal_eigenpair(dom, n_r);
  const ScalarField phi = lift_radial(grid, eig.phi);

  CoefficientSet c;
  c.domain = dom;
  c.competitive = false;
  c.alpha[0] = SpaceTimeCoefficient::constant(0.0);
  c.alpha[1] = SpaceTimeCoefficient::constant(0.0);
  std::array<NonlinearitySpec, 2> nl = {
      NonlinearitySpec::make_logistic({}, {}), NonlinearitySpec::make_logistic({}, {})};

  const double T = 1.0, dt = 1e-3;
  SystemState s0 = make_state(grid, phi, phi, 0.0);
  const auto res = simulate(s0, c, nl, T, dt, snapshots_every(1000));
  const double ratio = res.trajectory.snapshots.back().u1.max_abs() / phi.max_abs();
  const double expected = std::exp(-eig.lambda * T);
  const double rel = std::abs(ratio / expected - 1.0);
  record(3, "heat decay rate", rel <= 0.02,
         fmt("decay %.6f vs e^(-lambda1) = %.6f (rel %.2e <= 2e-2)", ratio, expected, rel),
         timer.seconds());
}

struct Scenario4Data {
  fs::path out_dir;
  Json report;
  ScenarioConfig config;
  bool ran = false;
};

Scenario4Data g_s4;

void criterion_4_theorem12(const fs::path& scenario_dir, const fs::path& work_dir) {
  Timer timer;
  ValidationReport vr;
  ScenarioConfig config = load_config(scenario_dir / "theorem12_disk.json", vr);
  if (!vr.valid) {
    record(4, "antipodal foliated Schwarz limit", false, "config failed to parse", timer.seconds());
    return;
  }

  g_s4.out_dir = work_dir / "theorem12_base";
  const RunOutcome outcome = run_scenario(config, g_s4.out_dir);
  g_s4.report = outcome.report;
  g_s4.config = config;
  g_s4.ran = true;

  bool pass = outcome.report["omega"]["status"] == "ok";
  std::size_t usable = 0;
  double max_fss = 0.0, max_gap = 0.0, max_mono_rel = 0.0;
  const double fss_tol = 1e-2;
  const double gap_tol = 3.0 * std::numbers::pi / 180.0;
  if (pass) {
    for (const Json& rep : outcome.report["omega"]["representatives"]) {
      if (rep["u1"]["degenerate"].get<bool>() || rep["u2"]["degenerate"].get<bool>()) continue;
      ++usable;
      const double f1 = rep["u1"]["fss_deviation"].get<double>();
      const double f2 = rep["u2"]["fss_deviation"].get<double>();
      const double gap = rep["antipodality"]["gap_radians"].get<double>();
      max_fss = std::max({max_fss, f1, f2});
      max_gap = std::max(max_gap, gap);
      const double m1 = rep["u1"]["monotonicity_violation"].get<double>();
      const double m2 = rep["u2"]["monotonicity_violation"].get<double>();
      const double scale = std::max({1e-300, rep["sup_u1"].get<double>(),
                                     rep["sup_u2"].get<double>()});
      max_mono_rel = std::max(max_mono_rel, std::max(m1, m2) / scale);
      pass = pass && f1 < fss_tol && f2 < fss_tol && gap < gap_tol &&
             m1 < fss_tol * scale && m2 < fss_tol * scale;
    }
    pass = pass && usable > 0;  // the conditional clause must not hold vacuously
  }

  // One grid refinement step: deviations decrease (or sit at the round-off
  // floor, where the equivariant scheme leaves nothing to decrease).
  double base_dev = 0.0, fine_dev = 0.0;
  if (pass) {
    ScenarioConfig fine = config;
    fine.n_r *= 2;
    fine.n_theta *= 2;
    auto grid = make_grid(fine.domain, fine.n_r, fine.n_theta);
    const CoefficientSet coeffs = fine.coefficient_set();
    const auto nl = make_logistic_pair(coeffs);
    auto [u1, u2] = build_initial_data(fine, grid);
    SimulateOptions opts;
    opts.snapshot_every_steps = fine.time.snapshot_every_steps;
    opts.mirror_coupling = true;
    opts.mirror_direction = fine.direction(*grid);
    const auto sim = simulate(make_state(grid, u1, u2, 0.0), coeffs, nl, fine.time.t_end,
                              fine.time.dt, opts);
    const double cluster =
        10.0 * (fine.time.dt + grid->h() * grid->h()) * std::max(1.0, sim.stats.sup_norm);
    const LimitProfileSet set = extract_limit_profiles(sim.trajectory, 0.2, cluster);
    for (const LimitRepresentative& r : set.representatives) {
      const AxisReport a1 = analyze_axis(r.snapshot.u1);
      const AxisReport a2 = analyze_axis(r.snapshot.u2);
      if (a1.degenerate || a2.degenerate) continue;
      fine_dev = std::max({fine_dev, a1.fss_deviation, a2.fss_deviation});
    }
    base_dev = max_fss;
    const bool decreases = fine_dev < base_dev || std::max(fine_dev, base_dev) < 1e-12;
    pass = pass && decreases;
  }

  record(4, "antipodal foliated Schwarz limit", pass,
         fmt("%zu usable reps; max fss %.2e < 1e-2; gap %.2e rad < %.2e; refined fss %.2e vs %.2e",
             usable, max_fss, max_gap, gap_tol, fine_dev, base_dev),
         timer.seconds());
}

void criterion_5_sign_preservation() {
  Timer timer;
  if (!g_s4.ran || !g_s4.report.contains("difference_sign")) {
    record(5, "difference-system signs", false, "scenario 4 unavailable", timer.seconds());
    return;
  }
  const Json& d = g_s4.report["difference_sign"];
  const double min1 = d["min_u1e"].get<double>();
  const double min2 = d["min_u2e"].get<double>();
  const double tol = d["tol_neg"].get<double>();
  const bool pass = min1 >= -tol && min2 >= -tol;
  record(5, "difference-system signs", pass,
         fmt("min u1^e %.2e, min u2^e %.2e >= -tol_neg with tol_neg %.2e", min1, min2, tol),
         timer.seconds());
}

void criterion_6_linearization_identity() {
  Timer timer;
  const Direction e(0.0);
  std::vector<double> r1s, r2s;
  for (int level = 0; level < 3; ++level) {
    const int n_r = 24 << level;
    const double dt = 2e-3 / std::pow(4.0, level);
    auto grid = make_grid(DomainSpec(0.0, 1.0), n_r, 2 * n_r);
    CoefficientSet c;
    c.domain = grid->domain();
    c.competitive = true;
    c.a[0] = {10.0, 2.0, 1.0, 0.0};
    c.a[1] = {8.0, 1.0, 1.3, 0.4};
    c.b[0] = TimeCoefficient::constant(1.0);
    c.b[1] = TimeCoefficient::constant(1.2);
    c.alpha[0] = {{1.5, 0.3, 0.7, 0.1}, {0.2, 1.0}, true};
    c.alpha[1] = {{1.2, 0.2, 0.9, 0.0}, {}, false};
    const auto nl = make_logistic_pair(c);
    auto [u1, u2] = shifted_bump_pair(grid, 1.0, 0.3, 0.2, e);
    const auto res = simulate(make_state(grid, u1, u2, 0.0), c, nl, 0.3, dt,
                              snapshots_every(4));
    const auto samples = linear_residual(res.trajectory, e, c, nl);
    const ResidualSample* best = &samples.front();
    for (const auto& s : samples)
      if (std::abs(s.t - 0.2) < std::abs(best->t - 0.2)) best = &s;
    r1s.push_back(best->r1);
    r2s.push_back(best->r2);
  }
  const double q1a = r1s[0] / r1s[1], q1b = r1s[1] / r1s[2];
  const double q2a = r2s[0] / r2s[1], q2b = r2s[1] / r2s[2];
  const bool pass = q1a >= 2.5 && q1b >= 2.5 && q2a >= 2.5 && q2b >= 2.5;
  record(6, "linearization identity", pass,
         fmt("residual ratios u1 (%.2f, %.2f), u2 (%.2f, %.2f) >= 2.5 per step", q1a, q1b, q2a,
             q2b),
         timer.seconds());
}

void criterion_7_semitrivial_radial_limit() {
  Timer timer;
  const DomainSpec dom(0.0, 1.0);
  const int n_r = 64;
  auto grid = make_grid(dom, n_r, 128);
  CoefficientSet c;
  c.domain = dom;
  c.competitive = true;
  for (int i = 0; i < 2; ++i) {
    c.a[i] = TimeCoefficient::constant(12.0);
    c.b[i] = TimeCoefficient::constant(1.0);
  }
  c.alpha[0] = SpaceTimeCoefficient::constant(6.0);
  c.alpha[1] = SpaceTimeCoefficient::constant(0.5);
  const auto nl = make_logistic_pair(c);
  auto [u1, u2] = shifted_bump_pair(grid, 1.0, 0.35, 0.18, Direction(0.0));
  const double dt = 4e-3;
  const auto res = simulate(make_state(grid, u1, u2, 0.0), c, nl, 30.0, dt,
                            snapshots_every(125));

  const Snapshot& last = res.trajectory.snapshots.back();
  const double extinct_ratio = last.u1.max_abs() / last.u2.max_abs();
  const double rad_dev = radial_deviation(last.u2);
  const SteadyProfile steady = radial_steady_state(12.0, 1.0, dom, n_r);
  const ScalarField target = lift_radial(grid, steady.profile);
  double err = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i)
    err = std::max(err, std::abs(last.u2.v[i] - target.v[i]));
  const double rel = err / target.max_abs();
  const bool pass = extinct_ratio < 1e-4 && rad_dev < 1e-2 && rel < 1e-2;
  record(7, "semi-trivial radial limit", pass,
         fmt("||z1||/||z2|| = %.2e < 1e-4; radial dev %.2e < 1e-2; steady-state rel %.2e < 1e-2",
             extinct_ratio, rad_dev, rel),
         timer.seconds());
}

void criterion_8_corner_probe() {
  Timer timer;
  // Calibration on the manufactured difference w = x1 (1 - |x|^2).
  auto grid = make_grid(DomainSpec(0.0, 1.0), 128, 256);
  ScalarField u1 = sample_field(grid, [](Point p) { return 0.5 * p.x * (1.0 - dot(p, p)); });
  const CornerReport man = corner_curvature_probe({u1, ScalarField(grid, 0.0), 1.0}, Direction(0.0));
  bool calib = true;
  double worst = 0.0;
  for (const CornerCurvature& c : man.species[0]) {
    worst = std::max({worst, std::abs(c.d_ss - 2.0), std::abs(c.d_stst + 2.0)});
    calib = calib && std::abs(c.d_ss - 2.0) <= 0.1 && std::abs(c.d_stst + 2.0) <= 0.1;
  }

  // Sign pattern on scenario 4's late-time differences, from its report.
  bool signs = false;
  if (g_s4.ran && g_s4.report["probes"]["corner"]["status"] == "ok") {
    signs = g_s4.report["probes"]["corner"]["u1"]["sign_pattern"].get<bool>() &&
            g_s4.report["probes"]["corner"]["u2"]["sign_pattern"].get<bool>();
  }
  record(8, "Serrin corner probe", calib && signs,
         fmt("manufactured (+2,-2) worst dev %.3f <= 0.1; late-time sign pattern %s", worst,
             signs ? "holds" : "fails"),
         timer.seconds());
}

void criterion_9_comparison_residuals() {
  Timer timer;
  const Direction e(0.0);
  bool pass = true;
  double printed_int = 0.0, printed_cor = 0.0;
  for (const double beta0 : {0.0, 1.0, 5.0}) {
    std::vector<double> m_int, m_cor;
    for (const int n : {32, 64, 128}) {
      auto grid = make_grid(DomainSpec(0.0, 1.0), n, 2 * n);
      const double r = 0.3;
      const auto c_const = [beta0](Point, double) { return beta0; };
      const Point x_star{std::cos(0.25 * std::numbers::pi), std::sin(0.25 * std::numbers::pi)};
      const Point y_int = (1.0 - r) * x_star;
      const ComparisonReport interior =
          comparison_residual(grid, ComparisonKind::Interior, e, y_int, r, 0.9, beta0, c_const);
      const Point y_cor{0.0, 1.0 - r};
      const ComparisonReport corner =
          comparison_residual(grid, ComparisonKind::Corner, e, y_cor, r, 1.0, beta0, c_const);
      m_int.push_back(std::max(0.0, interior.max_residual));
      m_cor.push_back(std::max(0.0, corner.max_residual));
    }
    for (int l = 0; l < 3; ++l) {
      const double tol = 1e-3 / (1 << l);
      pass = pass && m_int[l] <= tol && m_cor[l] <= tol;
    }
    printed_int = std::max(printed_int, m_int[0]);
    printed_cor = std::max(printed_cor, m_cor[0]);
  }
  record(9, "comparison barrier residuals", pass,
         fmt("positive part of max residual: interior %.2e, corner %.2e (tol 1e-3, halving)",
             printed_int, printed_cor),
         timer.seconds());
}

void criterion_10_harnack_quotient_stability() {
  Timer timer;
  std::vector<double> kappas;
  Trajectory fine_traj;
  for (const int n_r : {32, 64, 128}) {
    auto grid = make_grid(DomainSpec(0.0, 1.0), n_r, 2 * n_r);
    CoefficientSet c;
    c.domain = grid->domain();
    c.competitive = false;
    c.a[0] = TimeCoefficient::constant(11.5);
    c.b[0] = TimeCoefficient::constant(1.0);
    c.alpha[0] = SpaceTimeCoefficient::constant(0.0);
    c.alpha[1] = SpaceTimeCoefficient::constant(0.0);
    const auto nl = make_logistic_pair(c);
    ScalarField u1 = shifted_bump_pair(grid, 1.0, 0.3, 0.25, Direction(0.0)).first;
    const auto res = simulate(make_state(grid, u1, ScalarField(grid, 0.0), 0.0), c, nl, 6.0,
                              2.5e-3, snapshots_every(20));
    const TrajectoryView view = rescale_window(res.trajectory, 6.0, 1.0);
    std::vector<std::uint8_t> D(grid->node_count(), 0);
    for (std::size_t i = 0; i < grid->node_count(); ++i)
      if (grid->boundary_distance(i) > 0.25) D[i] = 1;
    kappas.push_back(harnack_ratio(view, 0, D).kappa);
    if (n_r == 128) fine_traj = std::move(res.trajectory);
  }
  const double mean = (kappas[0] + kappas[1] + kappas[2]) / 3.0;
  bool kappa_ok = mean > 0.0;
  for (double k : kappas) kappa_ok = kappa_ok && k > 0.0 && std::abs(k / mean - 1.0) <= 0.2;

  // Unit-time sup-norm ratios: bracket from the first post-transient window.
  const QuotientReport q = normalized_quotient_probe(fine_traj, 0, {5.0}, 0.5);
  double q_first = 0.0;
  bool ratio_ok = true;
  double worst_ratio = 1.0;
  for (const auto& [tau, ratio] : q.unit_ratios) {
    if (tau < 2.0) continue;
    if (q_first == 0.0) q_first = ratio;
    const double c2 = 0.95 * std::min(q_first, 1.0 / q_first);
    ratio_ok = ratio_ok && ratio >= c2 && ratio <= 1.0 / c2;
    if (std::abs(ratio - 1.0) > std::abs(worst_ratio - 1.0)) worst_ratio = ratio;
  }
  record(10, "Harnack/quotient stability", kappa_ok && ratio_ok,
         fmt("kappa {%.3f, %.3f, %.3f} within +-20%% of mean %.3f; ratios in [C2,1/C2], worst %.4f",
             kappas[0], kappas[1], kappas[2], mean, worst_ratio),
         timer.seconds());
}

void criterion_11_symmetrization_algebra() {
  Timer timer;
  auto grid = make_grid(DomainSpec(0.0, 1.0), 16, 64);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  bool pass = true;
  for (int trial = 0; trial < 100 && pass; ++trial) {
    ScalarField z(grid);
    for (double& v : z.v) v = unif(rng);
    const Direction p(ang(rng));
    const ScalarField s1 = foliated_schwarz_symmetrize(z, p);
    const ScalarField s2 = foliated_schwarz_symmetrize(s1, p);
    for (std::size_t i = 0; i < z.size(); ++i) pass = pass && s1.v[i] == s2.v[i];
    for (int j = grid->ring_first(); j <= grid->ring_last() && pass; ++j) {
      std::vector<double> a, b;
      for (int k = 0; k < grid->n_theta(); ++k) {
        a.push_back(z.v[grid->node_index(j, k)]);
        b.push_back(s1.v[grid->node_index(j, k)]);
      }
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      pass = pass && a == b;
    }
    pass = pass && fss_deviation(s1, p) == 0.0;
  }
  record(11, "symmetrization algebra", pass,
         "idempotence, multiset preservation, and zero deviation exact on 100 random fields",
         timer.seconds());
}

void criterion_12_determinism(const fs::path& work_dir) {
  Timer timer;
  if (!g_s4.ran) {
    record(12, "determinism", false, "scenario 4 unavailable", timer.seconds());
    return;
  }
  const fs::path rerun_dir = work_dir / "theorem12_rerun";
  run_scenario(g_s4.config, rerun_dir);
  const std::string a = slurp(g_s4.out_dir / "report.json");
  const std::string b = slurp(rerun_dir / "report.json");
  const bool pass = !a.empty() && a == b;
  record(12, "determinism", pass,
         fmt("report.json byte-identical across reruns (%zu bytes)", a.size()), timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  fs::path scenario_dir = "scenarios";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--scenarios") scenario_dir = argv[i + 1];

  const fs::path work_dir = fs::temp_directory_path() / "rdsym_acceptance";
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  std::printf("acceptance suite (scenarios at %s)\n", scenario_dir.string().c_str());
  criterion_1_discretization_order();
  criterion_2_eigenvalue_fidelity();
  criterion_3_decay_rate();
  criterion_4_theorem12(scenario_dir, work_dir);
  criterion_5_sign_preservation();
  criterion_6_linearization_identity();
  criterion_7_semitrivial_radial_limit();
  criterion_8_corner_probe();
  criterion_9_comparison_residuals();
  criterion_10_harnack_quotient_stability();
  criterion_11_symmetrization_algebra();
  criterion_12_determinism(work_dir);

  std::printf("%d of 12 criteria passed\n", 12 - g_failures);
  return g_failures;
}
