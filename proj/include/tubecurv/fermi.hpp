#pragma once

#include "tubecurv/geometry.hpp"

namespace tubecurv {

// Coordinates (alpha_1..alpha_m, beta_1..beta_k) in a Fermi chart along a
// base geodesic; alpha_1 runs along the geodesic.
struct FermiPoint {
  Vec alpha;
  Vec beta;
};

// Fermi chart along the unit-speed geodesic gamma(t) = exp_{x0}(t v):
//   phi(alpha, beta) = exp_{gamma(a1)}(sum_{i>=2} alpha_i e_i(a1))
//                      + sum_j beta_j n_j(alpha).
// Tangent frames are parallel along gamma; normal frames solve the
// first-order frame ODE (closed forms per catalogue entry).
class FermiChart {
 public:
  virtual ~FermiChart() = default;

  const Manifold& manifold() const { return *M_; }
  double delta_bound() const { return delta_bound_; }

  virtual Vec base_point(double a1) const = 0;  // gamma(a1)
  virtual FrameField frame(double a1) const = 0;
  virtual Vec surface_point(const Vec& alpha) const = 0;  // psi(alpha)
  virtual std::vector<Vec> normal_frame_at(const Vec& alpha) const = 0;

  Vec map(const FermiPoint& p) const;
  virtual FermiPoint invert(const Vec& z) const = 0;

  // Exact alpha-hat radius of the geodesic ball {d_M(psi(alpha), gamma(0)) < eps}
  // at slice alpha_1 = a1 (m >= 2 only).
  virtual double ball_range(double a1, double eps) const;

  // sqrt(det g) of the surface chart psi at alpha.
  virtual double surface_metric_factor(const Vec& alpha) const = 0;

  // Components H^i of the leaf mean curvature at phi(alpha, beta), paired
  // with the chart normal frame.
  virtual Vec leaf_H(const Vec& alpha, const Vec& beta) const = 0;

  // d/d alpha_1 (H^i o phi)(0); central differences with step h unless a
  // subclass supplies the closed form.
  virtual Vec dH_dalpha1(double h) const;

  // [sum_i d^2 g_ii / d alpha_q d alpha_l (0)] for q, l >= 2; (m-1) x (m-1).
  virtual Eigen::MatrixXd metric_trace_hessian() const;

  void check_in_chart(const FermiPoint& p) const;

 protected:
  const Manifold* M_ = nullptr;
  double delta_bound_ = 0.0;
};

// RK4 integration of the normal-frame ODE
//   dn_i/da1 = - sum_j <n_i, II(e_1(a1), e_j(a1))> e_j(a1)
// from the chart's frame at a1 = 0; test oracle for the closed-form frames.
std::vector<std::vector<Vec>> evolve_normal_frame_ode(const FermiChart& chart, double a_max,
                                                      int steps);

}  // namespace tubecurv
