// Command-line front end: validate configs, execute single scenarios, or
// run a directory of configs as a batch.  Exit codes: 0 success, 2 config
// error, 3 solver failure, 4 degenerate diagnostics.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include "rdsym/runner.hpp"

namespace fs = std::filesystem;
using namespace rdsym;

namespace {

struct LoadedConfig {
  ScenarioConfig config;
  ValidationReport structural;
};

LoadedConfig load(const fs::path& path, std::uint64_t seed_override, bool has_seed) {
  LoadedConfig lc;
  lc.config = load_config(path, lc.structural);
  if (has_seed) lc.config.seed = seed_override;
  return lc;
}

int do_run(const fs::path& config_path, const fs::path& out_dir, std::uint64_t seed,
           bool has_seed) {
  const LoadedConfig lc = load(config_path, seed, has_seed);
  if (!lc.structural.valid) {
    std::cerr << "config error in " << config_path << ":\n";
    for (const auto& e : lc.structural.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }
  const RunOutcome outcome = run_scenario(lc.config, out_dir);
  std::cout << lc.config.id << ": exit " << outcome.exit_code << ", report at "
            << (out_dir / "report.json") << "\n";
  for (const auto& [k, v] : outcome.report["verdicts"].items())
    if (v.is_string()) std::cout << "  " << k << ": " << v.get<std::string>() << "\n";
  return outcome.exit_code;
}

int do_validate(const fs::path& config_path) {
  LoadedConfig lc = load(config_path, 0, false);
  ValidationReport report = lc.structural;
  if (report.valid) report = validate_config(lc.config, report);
  std::cout << report.to_json().dump(2) << "\n";
  return report.valid ? 0 : 2;
}

int do_batch(const fs::path& dir, const fs::path& out_root, int jobs, std::uint64_t seed,
             bool has_seed) {
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) {
    std::cerr << "batch: no .json configs in " << dir << "\n";
    return 2;
  }

  std::atomic<std::size_t> next{0};
  std::vector<int> codes(configs.size(), 0);
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      const fs::path out_dir = out_root / configs[i].stem();
      codes[i] = do_run(configs[i], out_dir, seed, has_seed);
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int worst = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::cout << configs[i].filename() << " -> exit " << codes[i] << "\n";
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reaction-diffusion symmetry laboratory on planar disks and annuli"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int jobs = 1;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
      has_seed = true;
    });
  };

  CLI::App* run = app.add_subcommand("run", "execute one scenario config");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  add_seed(run);

  CLI::App* validate = app.add_subcommand("validate", "static checks on a config");
  validate->add_option("config", config_path, "scenario JSON file")->required();

  CLI::App* batch = app.add_subcommand("batch", "run every config in a directory");
  batch->add_option("config_dir", config_path, "directory of scenario JSON files")->required();
  batch->add_option("--out", out_dir, "output root directory");
  batch->add_option("--jobs", jobs, "concurrent runs");
  add_seed(batch);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, out_dir, seed, has_seed);
    if (validate->parsed()) return do_validate(config_path);
    if (batch->parsed()) return do_batch(config_path, out_dir, jobs, seed, has_seed);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 0;
}
