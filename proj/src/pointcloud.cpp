#include "tubecurv/pointcloud.hpp"

#include "tubecurv/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace tubecurv {

namespace {
constexpr int kAtomCap = 20000;  // exact-OT guardrail per side
}

double CloudExperiment::rate_ratio(int level) const {
  double n = intensities.at(level);
  double mk = manifold->ambient_dim();
  return std::log(n) * std::pow(n, -1.0 / mk) / (delta * delta * delta);
}

EmpiricalKappa empirical_kappa(const CloudExperiment& exp, int level, int trial) {
  const Manifold& M = *exp.manifold;
  auto chart = M.geodesic_chart(exp.x0, exp.v);
  Vec y = chart->base_point(exp.delta);

  TubeSegmentSpec sx, sy;
  sx.manifold = sy.manifold = &M;
  sx.chart = sy.chart = chart.get();
  sx.center_a1 = 0.0;
  sy.center_a1 = exp.delta;
  sx.sigma = sy.sigma = exp.sigma;
  sx.eps = sy.eps = exp.eps;
  double vol_x = quadrature_measure(sx, 8).total_mass;
  double vol_y = quadrature_measure(sy, 8).total_mass;

  double intensity = exp.intensities.at(level);
  auto draw = [&](const TubeSegmentSpec& spec, double vol, std::uint64_t role) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      RngStream rng(exp.seed, stream_tag({0xc10dULL, static_cast<std::uint64_t>(level),
                                          static_cast<std::uint64_t>(trial), role, attempt}));
      try {
        return poisson_tube(spec, intensity, rng, &vol);
      } catch (const EmptyCloudError&) {
        if (attempt >= 3) throw;
      }
    }
  };
  DiscreteMeasure mu = draw(sx, vol_x, 0);
  DiscreteMeasure nu = draw(sy, vol_y, 1);
  if (static_cast<int>(mu.points.size()) > kAtomCap ||
      static_cast<int>(nu.points.size()) > kAtomCap)
    throw MisconfigurationError("empirical_kappa: cloud exceeds the 20000-atom OT cap");

  EmpiricalKappa out;
  out.n_source = static_cast<int>(mu.points.size());
  out.n_target = static_cast<int>(nu.points.size());
  out.w1 = w1_exact(mu, nu).cost;
  out.chord = (y - exp.x0).norm();
  out.kappa = 1.0 - out.w1 / out.chord;
  out.kappa_delta = 1.0 - out.w1 / exp.delta;
  return out;
}

ConvergenceReport convergence_study(const CloudExperiment& exp, double final_band) {
  if (exp.intensities.size() < 3)
    throw ContractError("convergence_study: need at least 3 intensity levels");
  ConvergenceReport rep;
  rep.kappa_pred =
      predicted_w1(*exp.manifold, exp.x0, exp.v, exp.delta, exp.sigma, exp.eps).second;
  for (int level = 0; level < static_cast<int>(exp.intensities.size()); ++level) {
    std::vector<double> errs(exp.trials);
    par::for_each(exp.trials, [&](std::int64_t t) {
      EmpiricalKappa ek = empirical_kappa(exp, level, static_cast<int>(t));
      errs[t] = std::fabs(ek.kappa - rep.kappa_pred);
    });
    std::sort(errs.begin(), errs.end());
    double median = exp.trials % 2 == 1
                        ? errs[exp.trials / 2]
                        : 0.5 * (errs[exp.trials / 2 - 1] + errs[exp.trials / 2]);
    rep.rows.push_back({level, exp.intensities[level], median, exp.rate_ratio(level), exp.trials});
  }
  std::vector<double> ns, meds;
  for (const auto& r : rep.rows) {
    ns.push_back(r.intensity);
    meds.push_back(r.median_abs_err);
  }
  rep.fitted_rate = loglog_slope(ns, meds);
  rep.monotone = true;
  for (size_t i = 0; i + 1 < meds.size(); ++i)
    if (meds[i + 1] > meds[i]) rep.monotone = false;
  rep.pass = rep.monotone && meds.back() < final_band;
  return rep;
}

}  // namespace tubecurv
