#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rdsym/csv_io.hpp"
#include "rdsym/initial_data.hpp"
#include "rdsym/runner.hpp"
#include "rdsym/scenario.hpp"

using namespace rdsym;
namespace fs = std::filesystem;

namespace {

Json tiny_config_json() {
  Json j = Json::parse(R"({
    "id": "tiny",
    "domain": {"inner_radius": 0.0, "outer_radius": 1.0},
    "grid": {"n_r": 12, "n_theta": 24},
    "mode": "competitive",
    "coefficients": {
      "a1": {"c0": 8.0}, "a2": {"c0": 8.0},
      "b1": {"c0": 1.0}, "b2": {"c0": 1.0},
      "alpha1": {"c0": 1.5}, "alpha2": {"c0": 1.5}
    },
    "nonlinearity": "logistic",
    "initial_data": {"kind": "shifted_bump_pair", "amplitude": 1.0, "offset": 0.3, "width": 0.2},
    "direction_index": 0,
    "time": {"dt": 0.004, "t_end": 0.4, "snapshot_every_steps": 10},
    "diagnostics": {"symmetry": true, "omega": false, "steady_state_crosscheck": false, "probes": []},
    "tolerances": {"extinction": 1e-4, "cluster": 0.0, "fss_pass": 0.01,
                   "antipodal_deg": 3.0, "hypothesis": 1e-12},
    "seed": 5
  })");
  return j;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("rdsym_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, RoundTripIsLossless) {
  ValidationReport r1;
  const ScenarioConfig c1 = config_from_json(tiny_config_json(), r1);
  ASSERT_TRUE(r1.valid) << Json(r1.errors).dump();
  const Json serialized = config_to_json(c1);
  ValidationReport r2;
  const ScenarioConfig c2 = config_from_json(serialized, r2);
  ASSERT_TRUE(r2.valid);
  EXPECT_EQ(serialized, config_to_json(c2));  // parse . serialize . parse = parse
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
  Json j = tiny_config_json();
  j["surprise"] = 1;
  j["grid"]["n_theta"] = 17;
  j["time"]["dt"] = -0.5;
  ValidationReport r;
  config_from_json(j, r);
  EXPECT_FALSE(r.valid);
  EXPECT_GE(r.errors.size(), 3u);
}

TEST(Validate, AlphaFloorViolationInCompetitiveMode) {
  Json j = tiny_config_json();
  j["coefficients"]["alpha1"] = Json{{"c0", 0.5}, {"c1", 1.0}, {"omega", 1.0}, {"phase", 0.0}};
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  ASSERT_TRUE(r.valid);
  const ValidationReport v = validate_config(c, r);
  EXPECT_FALSE(v.valid);
  bool found = false;
  for (const auto& e : v.errors) found = found || e.find("(h2) floor") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Validate, ShiftedBumpsSatisfyStrictOrdering) {
  ValidationReport r;
  const ScenarioConfig c = config_from_json(tiny_config_json(), r);
  const ValidationReport v = validate_config(c, r);
  ASSERT_TRUE(v.valid);
  EXPECT_TRUE(v.checks["h0"]["holds"].get<bool>());
  EXPECT_TRUE(v.checks["h0"]["strict"].get<bool>());
  EXPECT_TRUE(v.warnings.empty());
}

TEST(Validate, RadialDataWarnsNonStrict) {
  Json j = tiny_config_json();
  j["initial_data"] = Json{{"kind", "radial_bump"},
                           {"amplitude", 1.0},
                           {"center_radius", 0.3},
                           {"width", 0.2}};
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  const ValidationReport v = validate_config(c, r);
  ASSERT_TRUE(v.valid);
  EXPECT_FALSE(v.checks["h0"]["strict"].get<bool>());
  bool warned = false;
  for (const auto& w : v.warnings)
    warned = warned || w.find("not-identically-symmetric") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(Validate, RejectsUnstableDt) {
  Json j = tiny_config_json();
  j["time"]["dt"] = 0.2;
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  const ValidationReport v = validate_config(c, r);
  EXPECT_FALSE(v.valid);
}

TEST(SnapshotCsv, RoundTripsThroughDisk) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 10, 16);
  auto [u1, u2] = shifted_bump_pair(grid, 1.3, 0.25, 0.2, Direction(0.0));
  const Snapshot snap{2.5, u1, u2};
  const fs::path dir = temp_dir("csv");
  write_snapshot_csv(dir / "snap.csv", snap);
  const Snapshot back = read_snapshot_csv(dir / "snap.csv", grid, 2.5);
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    EXPECT_DOUBLE_EQ(back.u1.v[i], u1.v[i]);
    EXPECT_DOUBLE_EQ(back.u2.v[i], u2.v[i]);
  }
  auto other = make_grid(DomainSpec(0.0, 1.0), 12, 16);
  EXPECT_THROW(read_snapshot_csv(dir / "snap.csv", other), std::runtime_error);
}

TEST(RunScenario, MinimalZeroHorizonRun) {
  Json j = tiny_config_json();
  j["time"]["t_end"] = 0.0;
  j["diagnostics"]["omega"] = false;
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  ASSERT_TRUE(r.valid);
  const fs::path dir = temp_dir("zero");
  const RunOutcome out = run_scenario(c, dir);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_EQ(out.report["manifest"]["snapshots"].size(), 1u);
  EXPECT_EQ(out.report["omega"]["status"], "skipped");
  // Stable schema: every section present even when skipped.
  for (const char* key :
       {"scenario", "validation", "scheme", "difference_sign", "omega",
        "steady_state_crosscheck", "probes", "manifest", "verdicts"})
    EXPECT_TRUE(out.report.contains(key)) << key;
}

TEST(RunScenario, InvalidConfigExitsTwo) {
  Json j = tiny_config_json();
  j["coefficients"]["alpha1"]["c0"] = -1.0;
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  const fs::path dir = temp_dir("bad");
  const RunOutcome out = run_scenario(c, dir);
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(RunScenario, DeterministicReports) {
  ValidationReport r;
  const ScenarioConfig c = config_from_json(tiny_config_json(), r);
  ASSERT_TRUE(r.valid);
  const fs::path d1 = temp_dir("det1");
  const fs::path d2 = temp_dir("det2");
  const RunOutcome o1 = run_scenario(c, d1);
  const RunOutcome o2 = run_scenario(c, d2);
  EXPECT_EQ(o1.exit_code, o2.exit_code);
  EXPECT_EQ(slurp(d1 / "report.json"), slurp(d2 / "report.json"));
  // Snapshot files byte-identical as well.
  EXPECT_EQ(slurp(d1 / "snapshots" / o1.report["manifest"]["snapshots"].back()["file"]
                            .get<std::string>()
                            .substr(10)),
            slurp(d2 / "snapshots" / o2.report["manifest"]["snapshots"].back()["file"]
                            .get<std::string>()
                            .substr(10)));
}

TEST(RunScenario, FileInitialDataPath) {
  auto grid = make_grid(DomainSpec(0.0, 1.0), 12, 24);
  auto [u1, u2] = shifted_bump_pair(grid, 1.0, 0.3, 0.2, Direction(0.0));
  const fs::path dir = temp_dir("fileinit");
  write_snapshot_csv(dir / "init.csv", {0.0, u1, u2});

  Json j = tiny_config_json();
  j["initial_data"] = Json{{"kind", "file"}, {"path", (dir / "init.csv").string()}};
  j["time"]["t_end"] = 0.05;
  ValidationReport r;
  const ScenarioConfig c = config_from_json(j, r);
  ASSERT_TRUE(r.valid);
  const RunOutcome out = run_scenario(c, dir / "out");
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_EQ(out.report["scheme"]["status"], "ok");
}

TEST(RadialCsv, WritesProfileTable) {
  RadialProfile prof{DomainSpec(0.0, 1.0), 8, std::vector<double>(9, 0.0)};
  for (int j = 0; j <= 8; ++j) prof.values[j] = 1.0 - prof.radius(j) * prof.radius(j);
  const fs::path dir = temp_dir("radialcsv");
  write_radial_csv(dir / "prof.csv", prof);
  std::ifstream in(dir / "prof.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "r,z");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 9);
}

TEST(RunScenario, BundledScenariosValidate) {
  for (const char* name : {"theorem12_disk", "semitrivial_radial", "harnack_quotient"}) {
    const fs::path p = fs::path(SCENARIO_DIR) / (std::string(name) + ".json");
    ASSERT_TRUE(fs::exists(p)) << p;
    ValidationReport r;
    const ScenarioConfig c = load_config(p, r);
    ASSERT_TRUE(r.valid) << name;
    const ValidationReport v = validate_config(c, r);
    EXPECT_TRUE(v.valid) << name << ": " << Json(v.errors).dump();
  }
}
