#pragma once

#include "tubecurv/estimator.hpp"

namespace tubecurv {

// Poisson point-cloud pipeline: empirical coarse curvature from random
// clouds in the two tube segments, plus convergence studies.
struct CloudExperiment {
  const Manifold* manifold = nullptr;
  Vec x0;
  Vec v;
  std::vector<double> intensities;  // one entry per level
  double delta = 0.0;
  double sigma = 0.0;
  double eps = 0.0;
  int trials = 50;
  std::uint64_t seed = 0;

  // log(n) n^{-1/(m+k)} / delta^3; the paper's rate condition wants o(1).
  double rate_ratio(int level) const;
};

struct EmpiricalKappa {
  double kappa = 0.0;        // chord-normalized, consistent with CurvatureEstimate
  double kappa_delta = 0.0;  // the paper's delta_n normalization
  double w1 = 0.0;
  double chord = 0.0;
  int n_source = 0;
  int n_target = 0;
};

EmpiricalKappa empirical_kappa(const CloudExperiment& exp, int level, int trial);

struct ConvergenceRow {
  int level = 0;
  double intensity = 0.0;
  double median_abs_err = 0.0;  // median |kappa_hat - kappa_pred| over trials
  double rate_ratio = 0.0;
  int trials = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double kappa_pred = 0.0;
  double fitted_rate = 0.0;  // log-log slope of the medians against intensity
  bool monotone = false;
  bool pass = false;
};

ConvergenceReport convergence_study(const CloudExperiment& exp, double final_band);

}  // namespace tubecurv
