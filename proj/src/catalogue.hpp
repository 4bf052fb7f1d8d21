#pragma once

#include "tubecurv/fermi.hpp"
#include "tubecurv/geometry.hpp"

#include <Eigen/Dense>

namespace tubecurv::detail {

class CircleM final : public Curve {
 public:
  explicit CircleM(double R);
  std::string name() const override;
  int codim() const override { return 1; }
  double reach_bound() const override { return R_; }
  double injectivity_bound() const override { return 0.99 * M_PI * R_; }
  Vec gamma(double s) const override;
  Vec dgamma(double s) const override;
  Vec ddgamma(double s) const override;
  std::vector<Vec> normal_frame_s(double s) const override;
  double arc_min() const override { return -M_PI * R_; }
  double arc_max() const override { return M_PI * R_; }
  double nearest_arc(const Vec& z) const override;
  double geodesic_distance(const Vec& x, const Vec& y) const override;
  ProjectionResult project(const Vec& z) const override;

  double radius() const { return R_; }

 private:
  double R_;
};

class LineM final : public Curve {
 public:
  explicit LineM(double window);
  std::string name() const override { return "planar-line"; }
  int codim() const override { return 1; }
  double reach_bound() const override { return 1e9; }
  double injectivity_bound() const override { return window_; }
  Vec gamma(double s) const override;
  Vec dgamma(double s) const override;
  Vec ddgamma(double s) const override;
  std::vector<Vec> normal_frame_s(double s) const override;
  double arc_min() const override { return -window_; }
  double arc_max() const override { return window_; }
  double nearest_arc(const Vec& z) const override { return z(0); }

 private:
  double window_;
};

class ParabolaM final : public Curve {
 public:
  ParabolaM(double c, double window);
  std::string name() const override;
  int codim() const override { return 1; }
  double reach_bound() const override { return 0.9 / std::fabs(c_); }
  double injectivity_bound() const override { return 2.0 * window_; }
  Vec gamma(double s) const override;
  Vec dgamma(double s) const override;
  Vec ddgamma(double s) const override;
  std::vector<Vec> normal_frame_s(double s) const override;
  double arc_min() const override { return -window_; }
  double arc_max() const override { return window_; }
  double nearest_arc(const Vec& z) const override;

  double arc_of_param(double x) const;
  double param_of_arc(double s) const;

 private:
  Vec position(double x) const;
  double c_;
  double window_;
};

class EllipseM final : public Curve {
 public:
  EllipseM(double a, double b, double t0, double window);
  std::string name() const override;
  int codim() const override { return 1; }
  double reach_bound() const override { return reach_; }
  double injectivity_bound() const override { return 2.0 * window_; }
  Vec gamma(double s) const override;
  Vec dgamma(double s) const override;
  Vec ddgamma(double s) const override;
  std::vector<Vec> normal_frame_s(double s) const override;
  double arc_min() const override { return -window_; }
  double arc_max() const override { return window_; }
  double nearest_arc(const Vec& z) const override;

  double arc_of_param(double t) const;
  double param_of_arc(double s) const;

 private:
  Vec position(double t) const;
  Vec velocity(double t) const;
  double speed(double t) const;
  double a_, b_, t0_, window_, reach_;
};

class HelixM final : public Curve {
 public:
  HelixM(double a, double b, double window);
  std::string name() const override;
  int codim() const override { return 2; }
  double reach_bound() const override { return 0.9 * std::min(osc_radius(), a_); }
  double injectivity_bound() const override { return 0.9 * window_; }
  Vec gamma(double s) const override;
  Vec dgamma(double s) const override;
  Vec ddgamma(double s) const override;
  std::vector<Vec> normal_frame_s(double s) const override;
  double arc_min() const override { return -window_; }
  double arc_max() const override { return window_; }
  double nearest_arc(const Vec& z) const override;

  double osc_radius() const { return c_ * c_ / a_; }
  double torsion() const { return b_ / (c_ * c_); }
  std::vector<Vec> chart_normal_frame(double s0, int dir, double a) const override;

 private:
  double a_, b_, c_, window_;
};

class SphereM final : public Manifold {
 public:
  SphereM(int m, double R);
  std::string name() const override;
  int dim() const override { return m_; }
  int codim() const override { return 1; }
  double reach_bound() const override { return R_; }
  double injectivity_bound() const override { return 0.99 * M_PI * R_; }
  Vec embed(const Vec& intrinsic) const override;
  Vec geodesic(const Vec& x, const Vec& v, double t) const override;
  double geodesic_distance(const Vec& x, const Vec& y) const override;
  ProjectionResult project(const Vec& z) const override;
  std::vector<Vec> tangent_frame(const Vec& x) const override;
  std::vector<Vec> normal_frame(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const override;
  double tube_volume_weight(const Vec& x, const Vec& beta) const override;
  Vec leaf_mean_curvature(const Vec& x, const Vec& beta) const override;
  double geodesic_polar_jacobian(double r) const override;
  std::unique_ptr<FermiChart> geodesic_chart(const Vec& x0, const Vec& v) const override;

  double radius() const { return R_; }

 private:
  int m_;
  double R_;
};

class TorusM final : public Manifold {
 public:
  TorusM(double R1, double R2);
  std::string name() const override;
  int dim() const override { return 2; }
  int codim() const override { return 2; }
  double reach_bound() const override { return std::min(R1_, R2_); }
  double injectivity_bound() const override { return 0.9 * M_PI * std::min(R1_, R2_); }
  Vec embed(const Vec& intrinsic) const override;
  Vec geodesic(const Vec& x, const Vec& v, double t) const override;
  double geodesic_distance(const Vec& x, const Vec& y) const override;
  ProjectionResult project(const Vec& z) const override;
  std::vector<Vec> tangent_frame(const Vec& x) const override;
  std::vector<Vec> normal_frame(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const override;
  double tube_volume_weight(const Vec& x, const Vec& beta) const override;
  Vec leaf_mean_curvature(const Vec& x, const Vec& beta) const override;
  double geodesic_polar_jacobian(double r) const override;
  std::unique_ptr<FermiChart> geodesic_chart(const Vec& x0, const Vec& v) const override;

  Eigen::Vector2d intrinsic_of(const Vec& x) const;  // arc-length coordinates
  Eigen::Vector2d wrap(const Eigen::Vector2d& du) const;
  double radius1() const { return R1_; }
  double radius2() const { return R2_; }

 private:
  double R1_, R2_;
};

class GraphM final : public Manifold {
 public:
  GraphM(double fxx, double fyy, double fxy, double window);
  std::string name() const override;
  int dim() const override { return 2; }
  int codim() const override { return 1; }
  double reach_bound() const override { return reach_; }
  double injectivity_bound() const override { return 0.9 * window_; }
  Vec embed(const Vec& intrinsic) const override;
  Vec geodesic(const Vec& x, const Vec& v, double t) const override;
  double geodesic_distance(const Vec& x, const Vec& y) const override;
  bool has_geodesic_distance() const override { return false; }
  ProjectionResult project(const Vec& z) const override;
  std::vector<Vec> tangent_frame(const Vec& x) const override;
  std::vector<Vec> normal_frame(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const override;
  double tube_volume_weight(const Vec& x, const Vec& beta) const override;
  Vec leaf_mean_curvature(const Vec& x, const Vec& beta) const override;
  std::unique_ptr<FermiChart> geodesic_chart(const Vec& x0, const Vec& v) const override;

 private:
  double f(const Eigen::Vector2d& p) const;
  Eigen::Vector2d grad(const Eigen::Vector2d& p) const;
  Eigen::Matrix2d metric(const Eigen::Vector2d& p) const;
  // Second fundamental form matrix in an orthonormal tangent basis.
  Eigen::Matrix2d shape_matrix(const Eigen::Vector2d& p) const;

  Eigen::Matrix2d hess_;
  double window_;
  double reach_;
};

}  // namespace tubecurv::detail
