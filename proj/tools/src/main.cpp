#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "optcache/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw optcache::InvalidInput("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void fail(const std::string& stage, const std::string& what) {
  std::cerr << "{\"error\":\"" << stage << "\",\"detail\":\"";
  for (char c : what) {
    if (c == '"' || c == '\\') std::cerr << '\\';
    if (c == '\n') {
      std::cerr << ' ';
      continue;
    }
    std::cerr << c;
  }
  std::cerr << "\"}" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimistic online caching simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed_override = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { seed_given = true; });

  auto* sweep = app.add_subcommand("sweep", "run a sweep of experiments");
  sweep->add_option("--config", config_path, "sweep file (JSON)")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();

  auto* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path, "config file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::string text = slurp(config_path);
      optcache::ExperimentConfig cfg = optcache::parse_config(text);
      if (seed_given) cfg.seed = seed_override;
      optcache::RunResult res = optcache::run_experiment(cfg, text, out_dir);
      std::cout << "T=" << res.T << " cum_utility=" << res.cum_utility
                << " regret=" << res.final_regret << " violation=" << res.final_violation
                << "\n";
    } else if (sweep->parsed()) {
      int failures = optcache::run_sweep(slurp(config_path), out_dir);
      if (failures > 0) {
        fail("sweep", std::to_string(failures) + " cell(s) failed");
        return 2;
      }
    } else if (validate->parsed()) {
      optcache::parse_config(slurp(config_path));
      std::cout << "ok\n";
    }
  } catch (const optcache::InvalidInput& e) {
    fail("config", e.what());
    return 1;
  } catch (const std::exception& e) {
    fail("runtime", e.what());
    return 1;
  }
  return 0;
}
