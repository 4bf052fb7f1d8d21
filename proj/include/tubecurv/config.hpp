#pragma once

#include "tubecurv/estimator.hpp"

#include <map>
#include <optional>
#include <string>

namespace tubecurv {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sigma/epsilon schedules are restricted to the grammar "c * delta^p".
struct ScheduleRule {
  double c = 0.0;
  double p = 1.0;
  double eval(double delta) const;
  static ScheduleRule parse(const std::string& text);
  std::string to_string() const;
};

struct ExperimentConfig {
  std::string name;
  std::string kind;  // "sweep" | "pointcloud"
  std::uint64_t seed = 0;

  std::string manifold_type;
  std::map<std::string, double> manifold_params;

  std::vector<double> base_point;
  std::vector<double> base_direction;

  double delta0 = 0.0;
  int levels = 0;
  ScheduleRule sigma_rule;
  ScheduleRule eps_rule;

  std::vector<Method> methods;
  int order = 12;
  int budget = 1024;
  int trials = 30;

  std::vector<double> intensities;  // pointcloud kind
  double band = 5e-3;

  std::optional<std::string> closed_form;
  double closed_form_rtol = 1e-6;
  std::optional<double> coeff_rtol;
  std::optional<double> resid_slope_min;
  std::optional<double> abs_kappa_slope_min;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text);
  void validate() const;
  std::unique_ptr<Manifold> make_manifold() const;

  double sigma_at(double delta) const { return sigma_rule.eval(delta); }
  double eps_at(double delta) const { return eps_rule.eval(delta); }
};

std::string describe_manifold_catalogue();

}  // namespace tubecurv
