#pragma once

#include "tubecurv/transport.hpp"

namespace tubecurv {

enum class Method { quadrature_T, dual, discrete_exact, point_cloud };

std::string method_name(Method m);
Method method_from_name(const std::string& s);

struct CurvatureEstimate {
  double kappa = 0.0;  // 1 - w1 / chord
  double w1 = 0.0;
  double chord = 0.0;
  Method method = Method::quadrature_T;
  double stderr_ = 0.0;       // 0 for deterministic methods
  double kappa_delta = 0.0;   // 1 - w1 / delta (the point-cloud normalization)
};

struct EstimatorOptions {
  int order = 12;       // quadrature order for deterministic methods
  int budget = 1024;    // samples per side / Poisson intensity
  int trials = 30;      // trials for stochastic methods
  std::uint64_t seed = 0;
};

// kappa_{sigma,eps}(x0, exp(delta v)) by the chosen method.
CurvatureEstimate coarse_curvature(const Manifold& M, const Vec& x0, const Vec& v, double delta,
                                   double sigma, double eps, Method method,
                                   const EstimatorOptions& opt = {});

// Closed-form prediction chord * (1 + c2) with
// c2 = (sigma^2/(k+2) - eps^2/(2(m+2))) <II(e1,e1), H>; refuses when the
// frame hypothesis II(e1, ej) = 0 fails.
std::pair<double, double> predicted_w1(const Manifold& M, const Vec& x0, const Vec& v,
                                       double delta, double sigma, double eps);

// <II(e1,e1), H(x0)> straight from the geometry module.
double curvature_inner_product(const Manifold& M, const Vec& x0, const Vec& v);

enum class RegimeSchedule { coupled, sigma_dominant, epsilon_dominant };

struct RegimeResult {
  std::vector<double> deltas;
  std::vector<double> per_level;  // rescaled kappa per level
  double extracted = 0.0;         // Richardson-extrapolated limit
  double diff_slope = 0.0;        // log-log slope of successive differences
  bool monotone = true;
};

RegimeResult regime_limit(const Manifold& M, const Vec& x0, const Vec& v,
                          RegimeSchedule schedule, int levels, double coupling_C = 1.0,
                          double delta0 = 0.4, const EstimatorOptions& opt = {});

// ||H(x0)||^2 from the direction sum of coarse curvatures.
double mean_curvature_norm(const Manifold& M, const Vec& x0, double delta, double sigma,
                           double eps, Method method, const EstimatorOptions& opt = {});

// Completes v to an orthonormal tangent basis (e1 = v first).
std::vector<Vec> frame_from_direction(const Manifold& M, const Vec& x0, const Vec& v);

}  // namespace tubecurv
