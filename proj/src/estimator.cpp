#include "tubecurv/estimator.hpp"

#include "tubecurv/parallel.hpp"

#include <cmath>

namespace tubecurv {

std::string method_name(Method m) {
  switch (m) {
    case Method::quadrature_T: return "quadrature_T";
    case Method::dual: return "dual";
    case Method::discrete_exact: return "discrete_exact";
    case Method::point_cloud: return "point_cloud";
  }
  return "?";
}

Method method_from_name(const std::string& s) {
  if (s == "quadrature_T") return Method::quadrature_T;
  if (s == "dual") return Method::dual;
  if (s == "discrete_exact") return Method::discrete_exact;
  if (s == "point_cloud") return Method::point_cloud;
  throw ContractError("unknown method: " + s);
}

std::vector<Vec> frame_from_direction(const Manifold& M, const Vec& x0, const Vec& v) {
  M.check_unit_tangent(x0, v);
  std::vector<Vec> frame{v};
  for (const Vec& e : M.tangent_frame(x0)) {
    Vec w = e;
    for (const Vec& f : frame) w -= w.dot(f) * f;
    double n = w.norm();
    if (n > 0.1 && static_cast<int>(frame.size()) < M.dim()) frame.push_back(w / n);
  }
  if (static_cast<int>(frame.size()) != M.dim())
    throw ContractError("frame_from_direction: failed to complete the frame");
  return frame;
}

namespace {

void check_theorem_hypothesis(const Manifold& M, const Vec& x0, const std::vector<Vec>& frame,
                              bool off_diagonal_all) {
  const int m = M.dim();
  for (int i = 0; i < (off_diagonal_all ? m : 1); ++i) {
    for (int j = i + 1; j < m; ++j) {
      Vec II = M.second_fundamental_form(x0, frame[i], frame[j]);
      if (II.norm() > 1e-9)
        throw ContractError("theorem hypothesis II(e_i, e_j) = 0 fails for this frame");
    }
  }
}

void check_regime_pre(double delta, double sigma, double eps) {
  if (std::max(sigma, eps) > 0.25 * delta * (1.0 + 1e-12))
    throw ContractError("coarse_curvature: require sigma v eps <= delta / 4");
}

}  // namespace

double curvature_inner_product(const Manifold& M, const Vec& x0, const Vec& v) {
  Vec II = M.second_fundamental_form(x0, v, v);
  return II.dot(M.mean_curvature(x0));
}

CurvatureEstimate coarse_curvature(const Manifold& M, const Vec& x0, const Vec& v, double delta,
                                   double sigma, double eps, Method method,
                                   const EstimatorOptions& opt) {
  check_regime_pre(delta, sigma, eps);
  check_theorem_hypothesis(M, x0, frame_from_direction(M, x0, v), false);

  auto chart = M.geodesic_chart(x0, v);
  Vec y = chart->base_point(delta);
  double chord = (y - x0).norm();

  CurvatureEstimate est;
  est.method = method;
  est.chord = chord;
  switch (method) {
    case Method::quadrature_T:
      est.w1 = upper_bound_via_T(*chart, delta, sigma, eps, opt.order);
      break;
    case Method::dual:
      est.w1 = dual_lower_bound(*chart, delta, sigma, eps, opt.order);
      break;
    case Method::discrete_exact:
    case Method::point_cloud: {
      const int trials = std::max(opt.trials, 30);
      TubeSegmentSpec sx, sy;
      sx.manifold = sy.manifold = &M;
      sx.chart = sy.chart = chart.get();
      sx.center_a1 = 0.0;
      sy.center_a1 = delta;
      sx.sigma = sy.sigma = sigma;
      sx.eps = sy.eps = eps;
      double vol_x = quadrature_measure(sx, 8).total_mass;
      double vol_y = quadrature_measure(sy, 8).total_mass;
      std::vector<double> w1s(trials);
      par::for_each(trials, [&](std::int64_t trial) {
        DiscreteMeasure mu, nu;
        if (method == Method::discrete_exact) {
          RngStream rx(opt.seed, stream_tag({1, static_cast<std::uint64_t>(trial), 0}));
          RngStream ry(opt.seed, stream_tag({1, static_cast<std::uint64_t>(trial), 1}));
          mu = sample_tube(sx, opt.budget, rx);
          nu = sample_tube(sy, opt.budget, ry);
        } else {
          RngStream rx(opt.seed, stream_tag({2, static_cast<std::uint64_t>(trial), 0}));
          RngStream ry(opt.seed, stream_tag({2, static_cast<std::uint64_t>(trial), 1}));
          mu = poisson_tube(sx, opt.budget, rx, &vol_x);
          nu = poisson_tube(sy, opt.budget, ry, &vol_y);
        }
        w1s[trial] = w1_exact(mu, nu).cost;
      });
      KahanSum mean;
      for (double w : w1s) mean.add(w);
      est.w1 = mean.value() / trials;
      double var = 0.0;
      for (double w : w1s) var += sqr(w - est.w1);
      var /= trials > 1 ? trials - 1 : 1;
      est.stderr_ = std::sqrt(var / trials) / chord;
      break;
    }
  }
  est.kappa = 1.0 - est.w1 / chord;
  est.kappa_delta = 1.0 - est.w1 / delta;
  return est;
}

std::pair<double, double> predicted_w1(const Manifold& M, const Vec& x0, const Vec& v,
                                       double delta, double sigma, double eps) {
  check_theorem_hypothesis(M, x0, frame_from_direction(M, x0, v), false);
  const double m = M.dim(), k = M.codim();
  double c2 = (sigma * sigma / (k + 2.0) - eps * eps / (2.0 * (m + 2.0))) *
              curvature_inner_product(M, x0, v);
  Vec y = M.geodesic(x0, v, delta);
  double chord = (y - x0).norm();
  return {chord * (1.0 + c2), -c2};
}

RegimeResult regime_limit(const Manifold& M, const Vec& x0, const Vec& v,
                          RegimeSchedule schedule, int levels, double coupling_C, double delta0,
                          const EstimatorOptions& opt) {
  if (levels < 4) throw ContractError("regime_limit: need at least 4 dyadic levels");
  const double m = M.dim(), k = M.codim();
  if (schedule == RegimeSchedule::coupled) {
    double excluded = std::sqrt(2.0 * (m + 2.0) / (k + 2.0));
    if (std::fabs(coupling_C - excluded) < 0.05)
      throw ContractError("regime_limit: coupling constant sits at the pseudo-flat value");
  }
  RegimeResult res;
  for (int level = 0; level < levels; ++level) {
    double delta = delta0 / std::pow(2.0, level);
    double base = 0.25 * delta;
    double sigma, eps;
    switch (schedule) {
      case RegimeSchedule::coupled:
        sigma = base / std::max(1.0, coupling_C);
        eps = coupling_C * sigma;
        break;
      case RegimeSchedule::sigma_dominant:
        sigma = base;
        eps = base * std::sqrt(delta / delta0);
        break;
      case RegimeSchedule::epsilon_dominant:
        eps = base;
        sigma = base * std::sqrt(delta / delta0);
        break;
      default:
        throw ContractError("regime_limit: unknown schedule");
    }
    CurvatureEstimate est =
        coarse_curvature(M, x0, v, delta, sigma, eps, Method::quadrature_T, opt);
    double rescaled;
    switch (schedule) {
      case RegimeSchedule::coupled:
        rescaled = est.kappa /
                   (sigma * sigma * (coupling_C * coupling_C / (2.0 * (m + 2.0)) - 1.0 / (k + 2.0)));
        break;
      case RegimeSchedule::sigma_dominant:
        rescaled = -(k + 2.0) * est.kappa / (sigma * sigma);
        break;
      default:
        rescaled = 2.0 * (m + 2.0) * est.kappa / (eps * eps);
        break;
    }
    res.deltas.push_back(delta);
    res.per_level.push_back(rescaled);
  }
  res.extracted = richardson(res.per_level);
  std::vector<double> diffs, dx;
  for (size_t i = 0; i + 1 < res.per_level.size(); ++i) {
    diffs.push_back(res.per_level[i + 1] - res.per_level[i]);
    dx.push_back(res.deltas[i]);
  }
  res.diff_slope = loglog_slope(dx, diffs);
  for (size_t i = 0; i + 1 < diffs.size(); ++i)
    if (std::fabs(diffs[i + 1]) > std::fabs(diffs[i])) res.monotone = false;
  return res;
}

double mean_curvature_norm(const Manifold& M, const Vec& x0, double delta, double sigma,
                           double eps, Method method, const EstimatorOptions& opt) {
  const double m = M.dim(), k = M.codim();
  double coef = eps * eps / (2.0 * (m + 2.0)) - sigma * sigma / (k + 2.0);
  if (std::fabs(coef) < 1e-12)
    throw ContractError("mean_curvature_norm: pseudo-flat schedule, coefficient vanishes");
  std::vector<Vec> frame = M.tangent_frame(x0);
  check_theorem_hypothesis(M, x0, frame, true);
  KahanSum sum;
  for (const Vec& e : frame)
    sum.add(coarse_curvature(M, x0, e, delta, sigma, eps, method, opt).kappa);
  return sum.value() / coef;
}

}  // namespace tubecurv
