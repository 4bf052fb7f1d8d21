#include "tubecurv/runner.hpp"

#include "tubecurv/parallel.hpp"
#include "tubecurv/pointcloud.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace tubecurv {

double circle_closed_form_w1(double R, double delta, double sigma, double eps) {
  return 2.0 * R * R * std::sin(delta / (2.0 * R)) * std::sin(eps / R) / eps *
         (1.0 + sigma * sigma / (3.0 * R * R));
}

std::string csv_header() {
  return "schema,experiment,manifold,method,level,trial,delta,sigma,epsilon,order,budget,seed,"
         "w1,chord,kappa,kappa_delta,kappa_pred,abs_err,stderr,runtime_ms";
}

std::string csv_line(const RunRow& r) {
  std::ostringstream os;
  os << r.schema << ',' << r.experiment << ',' << r.manifold << ',' << r.method << ',' << r.level
     << ',' << r.trial << ',' << format_double(r.delta) << ',' << format_double(r.sigma) << ','
     << format_double(r.epsilon) << ',' << r.order << ',' << r.budget << ',' << r.seed << ','
     << format_double(r.w1) << ',' << format_double(r.chord) << ',' << format_double(r.kappa)
     << ',' << format_double(r.kappa_delta) << ',' << format_double(r.kappa_pred) << ','
     << format_double(r.abs_err) << ',' << format_double(r.stderr_) << ','
     << format_double(r.runtime_ms);
  return os.str();
}

namespace {

nlohmann::json row_json(const RunRow& r) {
  return {{"schema", r.schema},   {"experiment", r.experiment},
          {"manifold", r.manifold}, {"method", r.method},
          {"level", r.level},     {"trial", r.trial},
          {"delta", r.delta},     {"sigma", r.sigma},
          {"epsilon", r.epsilon}, {"order", r.order},
          {"budget", r.budget},   {"seed", r.seed},
          {"w1", r.w1},           {"chord", r.chord},
          {"kappa", r.kappa},     {"kappa_delta", r.kappa_delta},
          {"kappa_pred", r.kappa_pred}, {"abs_err", r.abs_err},
          {"stderr", r.stderr_},  {"runtime_ms", r.runtime_ms}};
}

// self-validation of an emitted row after a text round trip
void revalidate_row(const RunRow& r) {
  if (!(r.chord > 0.0)) throw ContractError("row check: chord must be positive");
  double kappa = 1.0 - r.w1 / r.chord;
  if (kappa != r.kappa) throw ContractError("row check: kappa != 1 - w1/chord after round trip");
  if (std::isfinite(r.kappa_pred)) {
    double err = std::fabs(r.kappa - r.kappa_pred);
    if (err != r.abs_err) throw ContractError("row check: abs_err mismatch after round trip");
  }
}

RunRow parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) f.push_back(tok);
  if (f.size() != 20) throw ContractError("row check: wrong column count");
  RunRow r;
  r.schema = std::stoi(f[0]);
  r.experiment = f[1];
  r.manifold = f[2];
  r.method = f[3];
  r.level = std::stoi(f[4]);
  r.trial = std::stoi(f[5]);
  r.delta = std::stod(f[6]);
  r.sigma = std::stod(f[7]);
  r.epsilon = std::stod(f[8]);
  r.order = std::stoi(f[9]);
  r.budget = std::stoi(f[10]);
  r.seed = std::stoull(f[11]);
  r.w1 = std::stod(f[12]);
  r.chord = std::stod(f[13]);
  r.kappa = std::stod(f[14]);
  r.kappa_delta = std::stod(f[15]);
  r.kappa_pred = std::stod(f[16]);
  r.abs_err = std::stod(f[17]);
  r.stderr_ = std::stod(f[18]);
  r.runtime_ms = std::stod(f[19]);
  return r;
}

struct CheckOutcome {
  std::string line;
  bool pass = true;
};

std::vector<CheckOutcome> evaluate_checks(const ExperimentConfig& cfg, const Manifold& M,
                                          const Vec& x0, const Vec& v,
                                          const std::vector<RunRow>& rows) {
  std::vector<CheckOutcome> out;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    out.push_back({std::string(pass ? "PASS" : "FAIL") + "  " + name + "  " + detail, pass});
  };

  if (cfg.closed_form) {
    if (*cfg.closed_form != "circle") throw ConfigError("checks: closed_form supports 'circle'");
    double R = cfg.manifold_params.at("radius");
    double worst = 0.0;
    for (const RunRow& r : rows) {
      if (r.method != "quadrature_T" && r.method != "dual") continue;
      double cf = circle_closed_form_w1(R, r.delta, r.sigma, r.epsilon);
      worst = std::max(worst, std::fabs(r.w1 - cf) / cf);
    }
    add("closed-form-w1", worst <= cfg.closed_form_rtol,
        "max rel err " + format_double(worst) + " tol " + format_double(cfg.closed_form_rtol));
  }

  if (cfg.coeff_rtol) {
    double ip = curvature_inner_product(M, x0, v);
    std::vector<double> level_vals;
    for (const RunRow& r : rows) {
      if (r.method != "quadrature_T") continue;
      double q = sqr(r.epsilon) / (2.0 * (M.dim() + 2.0)) - sqr(r.sigma) / (M.codim() + 2.0);
      level_vals.push_back(r.kappa / q);
    }
    double extracted = richardson(level_vals);
    double rel = std::fabs(extracted - ip) / std::fabs(ip);
    add("coefficient-recovery", rel <= *cfg.coeff_rtol,
        "extrapolated " + format_double(extracted) + " predicted " + format_double(ip) +
            " rel err " + format_double(rel));
  }

  if (cfg.resid_slope_min) {
    std::vector<double> ds, errs;
    for (const RunRow& r : rows) {
      if (r.method != "quadrature_T") continue;
      ds.push_back(r.delta);
      errs.push_back(r.abs_err);
    }
    double slope = loglog_slope(ds, errs);
    add("residual-slope", slope >= *cfg.resid_slope_min,
        "slope " + format_double(slope) + " min " + format_double(*cfg.resid_slope_min));
  }

  if (cfg.abs_kappa_slope_min) {
    std::vector<double> ds, ks;
    for (const RunRow& r : rows) {
      if (r.method != "quadrature_T") continue;
      ds.push_back(r.delta);
      ks.push_back(std::fabs(r.kappa));
    }
    double slope = loglog_slope(ds, ks);
    add("kappa-slope", slope >= *cfg.abs_kappa_slope_min,
        "slope " + format_double(slope) + " min " + format_double(*cfg.abs_kappa_slope_min));
  }

  if (cfg.kind == "pointcloud") {
    // medians per level, monotone decrease, final below band
    std::vector<double> med;
    for (int level = 0; level < static_cast<int>(cfg.intensities.size()); ++level) {
      std::vector<double> errs;
      for (const RunRow& r : rows)
        if (r.level == level) errs.push_back(r.abs_err);
      std::sort(errs.begin(), errs.end());
      med.push_back(errs.empty() ? 0.0
                                 : (errs.size() % 2 ? errs[errs.size() / 2]
                                                    : 0.5 * (errs[errs.size() / 2 - 1] +
                                                             errs[errs.size() / 2])));
    }
    bool monotone = true;
    for (size_t i = 0; i + 1 < med.size(); ++i) monotone = monotone && med[i + 1] <= med[i];
    bool final_ok = !med.empty() && med.back() < cfg.band;
    std::string detail = "medians";
    for (double m : med) detail += " " + format_double(m);
    add("pointcloud-band", monotone && final_ok, detail + " band " + format_double(cfg.band));
  }

  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opt) {
  ExperimentConfig cfg = cfg_in;
  if (opt.seed_override) cfg.seed = *opt.seed_override;

  int workers = opt.workers;
  if (workers == 0) {
    if (const char* env = std::getenv("TUBECURV_WORKERS")) workers = std::atoi(env);
  }
  par::enabled() = workers != 1;
  if (workers > 1) par::set_max_threads(workers);

  auto M = cfg.make_manifold();
  Vec x0 = M->embed(Eigen::Map<const Vec>(cfg.base_point.data(), cfg.base_point.size()));
  std::vector<Vec> tf = M->tangent_frame(x0);
  if (static_cast<int>(cfg.base_direction.size()) != M->dim())
    throw ConfigError("config: direction must have dim(M) coefficients");
  Vec v = Vec::Zero(M->ambient_dim());
  for (int i = 0; i < M->dim(); ++i) v += cfg.base_direction[i] * tf[i];
  v /= v.norm();

  struct Task {
    int level, trial, method_idx;
  };
  std::vector<Task> tasks;
  if (cfg.kind == "sweep") {
    for (int level = 0; level < cfg.levels; ++level)
      for (size_t mi = 0; mi < cfg.methods.size(); ++mi)
        tasks.push_back({level, 0, static_cast<int>(mi)});
  } else {
    for (int level = 0; level < static_cast<int>(cfg.intensities.size()); ++level)
      for (int trial = 0; trial < cfg.trials; ++trial) tasks.push_back({level, trial, -1});
  }

  std::vector<RunRow> rows(tasks.size());
  std::vector<std::string> task_errors(tasks.size());
  par::for_each(static_cast<std::int64_t>(tasks.size()), [&](std::int64_t ti) {
   try {
    const Task& task = tasks[ti];
    auto t_start = std::chrono::steady_clock::now();
    RunRow r;
    r.experiment = cfg.name;
    r.manifold = cfg.manifold_type;
    r.level = task.level;
    r.trial = task.trial;
    r.order = cfg.order;
    r.budget = cfg.budget;
    r.seed = cfg.seed;
    if (cfg.kind == "sweep") {
      double delta = cfg.delta0 / std::pow(2.0, task.level);
      r.delta = delta;
      r.sigma = cfg.sigma_at(delta);
      r.epsilon = cfg.eps_at(delta);
      Method method = cfg.methods[task.method_idx];
      r.method = method_name(method);
      EstimatorOptions eopt;
      eopt.order = cfg.order;
      eopt.budget = cfg.budget;
      eopt.trials = cfg.trials;
      eopt.seed = cfg.seed + static_cast<std::uint64_t>(task.level);
      CurvatureEstimate est =
          coarse_curvature(*M, x0, v, delta, r.sigma, r.epsilon, method, eopt);
      r.w1 = est.w1;
      r.chord = est.chord;
      r.kappa = est.kappa;
      r.kappa_delta = est.kappa_delta;
      r.stderr_ = est.stderr_;
    } else {
      r.method = "point_cloud";
      r.delta = cfg.delta0;
      r.sigma = cfg.sigma_at(cfg.delta0);
      r.epsilon = cfg.eps_at(cfg.delta0);
      r.budget = static_cast<int>(cfg.intensities[task.level]);
      CloudExperiment ce;
      ce.manifold = M.get();
      ce.x0 = x0;
      ce.v = v;
      ce.intensities = cfg.intensities;
      ce.delta = r.delta;
      ce.sigma = r.sigma;
      ce.eps = r.epsilon;
      ce.trials = cfg.trials;
      ce.seed = cfg.seed;
      EmpiricalKappa ek = empirical_kappa(ce, task.level, task.trial);
      r.w1 = ek.w1;
      r.chord = ek.chord;
      r.kappa = ek.kappa;
      r.kappa_delta = ek.kappa_delta;
      r.stderr_ = 0.0;
    }
    try {
      auto [w1p, kp] = predicted_w1(*M, x0, v, r.delta, r.sigma, r.epsilon);
      (void)w1p;
      r.kappa_pred = kp;
      r.abs_err = std::fabs(r.kappa - r.kappa_pred);
    } catch (const ContractError&) {
      r.kappa_pred = std::numeric_limits<double>::quiet_NaN();
      r.abs_err = std::numeric_limits<double>::quiet_NaN();
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t_start)
                       .count();
    rows[ti] = std::move(r);
   } catch (const std::exception& ex) {
    task_errors[ti] = ex.what();
   }
  });
  for (const std::string& e : task_errors)
    if (!e.empty()) throw std::runtime_error("task failed: " + e);

  RunResult res;
  res.rows = rows;

  std::ostringstream csv;
  csv << csv_header() << "\n";
  for (const RunRow& r : rows) csv << csv_line(r) << "\n";
  res.csv_text = csv.str();

  res.csv_path = opt.out_dir + "/" + cfg.name + ".csv";
  res.jsonl_path = opt.out_dir + "/" + cfg.name + ".jsonl";
  {
    std::ofstream fcsv(res.csv_path);
    if (!fcsv) throw std::runtime_error("cannot write " + res.csv_path);
    fcsv << res.csv_text;
    std::ofstream fjsonl(res.jsonl_path);
    for (const RunRow& r : rows) fjsonl << row_json(r).dump() << "\n";
  }

  // round-trip check mode: every emitted row re-validates on load
  {
    std::istringstream is(res.csv_text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line))
      if (!line.empty()) revalidate_row(parse_csv_row(line));
  }

  auto checks = evaluate_checks(cfg, *M, x0, v, rows);
  bool all_pass = true;
  for (const auto& c : checks) {
    res.summary.push_back(c.line);
    all_pass = all_pass && c.pass;
  }
  {
    std::ofstream fsum(opt.out_dir + "/" + cfg.name + ".summary.txt");
    for (const auto& s : res.summary) fsum << s << "\n";
  }
  res.exit_code = all_pass ? 0 : 3;
  return res;
}

}  // namespace tubecurv
