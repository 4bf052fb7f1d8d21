#pragma once

#include "tubecurv/config.hpp"

#include <optional>

namespace tubecurv {

struct RunOptions {
  std::string out_dir = ".";
  int workers = 0;  // 0: TUBECURV_WORKERS env or all cores; 1: serial path
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
};

// One row per (level, trial, method); the CSV column set, fixed.
struct RunRow {
  int schema = 1;
  std::string experiment;
  std::string manifold;
  std::string method;
  int level = 0;
  int trial = 0;
  double delta = 0.0, sigma = 0.0, epsilon = 0.0;
  int order = 0, budget = 0;
  std::uint64_t seed = 0;
  double w1 = 0.0, chord = 0.0, kappa = 0.0, kappa_delta = 0.0;
  double kappa_pred = 0.0, abs_err = 0.0, stderr_ = 0.0;
  double runtime_ms = 0.0;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 3 check failed
  std::vector<RunRow> rows;
  std::vector<std::string> summary;
  std::string csv_path, jsonl_path;
  std::string csv_text;
};

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

std::string csv_header();
std::string csv_line(const RunRow& row);

// The closed-form circle W1 used by the closed_form check.
double circle_closed_form_w1(double R, double delta, double sigma, double eps);

}  // namespace tubecurv
