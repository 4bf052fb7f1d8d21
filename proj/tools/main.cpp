#include "tubecurv/config.hpp"
#include "tubecurv/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace tubecurv;

int main(int argc, char** argv) {
  CLI::App app{"coarse extrinsic curvature experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;

  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--workers", workers, "worker count (1 = serial reference path)");
  run->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the master seed");

  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", config_path, "config file")->required();

  app.add_subcommand("list-manifolds", "print the manifold catalogue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  have_seed = seed_opt->count() > 0;

  try {
    if (app.got_subcommand("list-manifolds")) {
      std::cout << describe_manifold_catalogue();
      return 0;
    }
    if (app.got_subcommand("validate")) {
      ExperimentConfig::parse_file(config_path);
      std::cout << "config ok\n";
      return 0;
    }
    // run
    ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    RunOptions opt;
    opt.out_dir = out_dir;
    opt.workers = workers;
    if (have_seed) opt.seed_override = seed;
    RunResult res = run_experiment(cfg, opt);
    std::cout << "wrote " << res.csv_path << " (" << res.rows.size() << " rows)\n";
    for (const auto& s : res.summary) std::cout << s << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
