#include "tubecurv/fermi.hpp"

#include "catalogue.hpp"

#include <cmath>

namespace tubecurv {

Vec FermiChart::map(const FermiPoint& p) const {
  check_in_chart(p);
  Vec z = surface_point(p.alpha);
  std::vector<Vec> ns = normal_frame_at(p.alpha);
  for (int j = 0; j < M_->codim(); ++j) z += p.beta(j) * ns[j];
  return z;
}

double FermiChart::ball_range(double, double) const {
  throw UnsupportedError("ball_range: chart has no alpha-hat directions");
}

Vec FermiChart::dH_dalpha1(double h) const {
  Vec beta = Vec::Zero(M_->codim());
  Vec ap = Vec::Zero(M_->dim()), am = Vec::Zero(M_->dim());
  ap(0) = h;
  am(0) = -h;
  return (leaf_H(ap, beta) - leaf_H(am, beta)) / (2.0 * h);
}

Eigen::MatrixXd FermiChart::metric_trace_hessian() const {
  int m = M_->dim();
  if (m == 1) return Eigen::MatrixXd::Zero(0, 0);
  throw UnsupportedError("metric_trace_hessian: no closed form for this chart");
}

void FermiChart::check_in_chart(const FermiPoint& p) const {
  if (p.alpha.size() != M_->dim() || p.beta.size() != M_->codim())
    throw ContractError("fermi: coordinate dimensions do not match manifold");
  if (std::fabs(p.alpha(0)) > delta_bound_)
    throw OutOfDomainError("fermi: alpha_1 outside chart bound");
  if (p.alpha.size() > 1 && p.alpha.tail(p.alpha.size() - 1).norm() >= M_->injectivity_bound())
    throw OutOfDomainError("fermi: alpha-hat outside injectivity bound");
  if (p.beta.norm() >= M_->reach_bound())
    throw OutOfReachError("fermi: beta outside reach bound");
}

namespace {

using detail::CircleM;
using detail::SphereM;
using detail::TorusM;

class CurveChart final : public FermiChart {
 public:
  CurveChart(const Curve* c, double s0, int dir) : curve_(c), s0_(s0), dir_(dir) {
    M_ = c;
    delta_bound_ = std::min(c->arc_max() - s0, s0 - c->arc_min());
  }

  Vec base_point(double a1) const override { return curve_->gamma(s0_ + dir_ * a1); }

  FrameField frame(double a1) const override {
    FrameField f;
    f.base = base_point(a1);
    f.tangent = {dir_ * curve_->dgamma(s0_ + dir_ * a1)};
    f.normal = curve_->chart_normal_frame(s0_, dir_, a1);
    return f;
  }

  Vec surface_point(const Vec& alpha) const override { return base_point(alpha(0)); }

  std::vector<Vec> normal_frame_at(const Vec& alpha) const override {
    return curve_->chart_normal_frame(s0_, dir_, alpha(0));
  }

  FermiPoint invert(const Vec& z) const override {
    Vec x0 = base_point(0.0);
    Vec e1 = dir_ * curve_->dgamma(s0_);
    double a = (z - x0).dot(e1);
    for (int it = 0; it < 50; ++it) {
      double s = s0_ + dir_ * a;
      Vec r = z - curve_->gamma(s);
      double g = dir_ * r.dot(curve_->dgamma(s));
      double dg = -1.0 + r.dot(curve_->ddgamma(s));
      double step = g / dg;
      a -= step;
      if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(a))) break;
    }
    FermiPoint p;
    p.alpha = Vec::Constant(1, a);
    std::vector<Vec> ns = normal_frame_at(p.alpha);
    Vec r = z - base_point(a);
    p.beta = Vec(curve_->codim());
    for (int j = 0; j < curve_->codim(); ++j) p.beta(j) = r.dot(ns[j]);
    return p;
  }

  double surface_metric_factor(const Vec&) const override { return 1.0; }

  Vec leaf_H(const Vec& alpha, const Vec& beta) const override {
    double s = s0_ + dir_ * alpha(0);
    Vec dd = curve_->ddgamma(s);
    std::vector<Vec> ns = curve_->chart_normal_frame(s0_, dir_, alpha(0));
    Vec k(curve_->codim());
    for (int j = 0; j < curve_->codim(); ++j) k(j) = ns[j].dot(dd);
    return k / (1.0 - beta.dot(k));
  }

 private:
  const Curve* curve_;
  double s0_;
  int dir_;
};

class SphereChart final : public FermiChart {
 public:
  SphereChart(const SphereM* s, Vec x0, Vec v) : sphere_(s), x0_(std::move(x0)), v_(std::move(v)) {
    M_ = s;
    R_ = s->radius();
    delta_bound_ = 0.45 * M_PI * R_;
    // constant frame of the directions orthogonal to the geodesic 2-plane
    std::vector<Vec> tf = s->tangent_frame(x0_);
    for (const Vec& e : tf) {
      Vec w = e - e.dot(v_) * v_;
      for (const Vec& f : ehat_) w -= w.dot(f) * f;
      double n = w.norm();
      if (n > 0.1) ehat_.push_back(w / n);
    }
  }

  Vec base_point(double a1) const override {
    return std::cos(a1 / R_) * x0_ + R_ * std::sin(a1 / R_) * v_;
  }

  Vec tangent1(double a1) const {
    return -std::sin(a1 / R_) / R_ * x0_ + std::cos(a1 / R_) * v_;
  }

  FrameField frame(double a1) const override {
    FrameField f;
    f.base = base_point(a1);
    f.tangent.push_back(tangent1(a1));
    for (const Vec& e : ehat_) f.tangent.push_back(e);
    f.normal = {f.base / R_};
    return f;
  }

  Vec surface_point(const Vec& alpha) const override {
    int m = sphere_->dim();
    double rho = alpha.tail(m - 1).norm();
    Vec g = base_point(alpha(0));
    if (rho == 0.0) return g;
    Vec u = Vec::Zero(m + 1);
    for (int j = 1; j < m; ++j) u += alpha(j) * ehat_[j - 1];
    u /= rho;
    return std::cos(rho / R_) * g + R_ * std::sin(rho / R_) * u;
  }

  std::vector<Vec> normal_frame_at(const Vec& alpha) const override {
    return {surface_point(alpha) / R_};
  }

  FermiPoint invert(const Vec& z) const override {
    int m = sphere_->dim();
    double r = z.norm();
    Vec p = (R_ / r) * z;
    Vec w = Vec::Zero(m + 1);
    for (const Vec& e : ehat_) w += p.dot(e) * e;
    double wn = w.norm();
    double rho = R_ * std::asin(std::min(wn / R_, 1.0));
    FermiPoint fp;
    fp.alpha = Vec::Zero(m);
    fp.alpha(0) = R_ * std::atan2(R_ * p.dot(v_), p.dot(x0_));
    if (wn > 0.0) {
      for (int j = 1; j < m; ++j) fp.alpha(j) = rho * p.dot(ehat_[j - 1]) / wn;
    }
    fp.beta = Vec::Constant(1, r - R_);
    return fp;
  }

  double ball_range(double a1, double eps) const override {
    double val = std::cos(eps / R_) / std::cos(a1 / R_);
    val = std::clamp(val, -1.0, 1.0);
    return R_ * std::acos(val);
  }

  double surface_metric_factor(const Vec& alpha) const override {
    int m = sphere_->dim();
    double rho = alpha.tail(m - 1).norm();
    double f = std::cos(rho / R_);
    if (m > 2 && rho > 0.0) f *= std::pow(R_ * std::sin(rho / R_) / rho, m - 2);
    return f;
  }

  Vec leaf_H(const Vec&, const Vec& beta) const override {
    return Vec::Constant(1, -sphere_->dim() / (R_ + beta(0)));
  }

  Vec dH_dalpha1(double) const override { return Vec::Zero(1); }

  Eigen::MatrixXd metric_trace_hessian() const override {
    if (sphere_->dim() != 2)
      throw UnsupportedError("sphere chart: metric expansion implemented for m = 2");
    // g_11 = cos^2(alpha_2 / R), g_22 = 1
    return Eigen::MatrixXd::Constant(1, 1, -2.0 / (R_ * R_));
  }

 private:
  const SphereM* sphere_;
  Vec x0_, v_;
  double R_;
  std::vector<Vec> ehat_;
};

class TorusChart final : public FermiChart {
 public:
  TorusChart(const TorusM* t, const Vec& x0, const Vec& v) : torus_(t) {
    M_ = t;
    u0_ = t->intrinsic_of(x0);
    std::vector<Vec> e = t->tangent_frame(x0);
    dir_ << v.dot(e[0]), v.dot(e[1]);
    perp_ << -dir_(1), dir_(0);
    delta_bound_ = t->injectivity_bound();
  }

  Vec base_point(double a1) const override { return torus_->embed(u0_ + a1 * dir_); }

  FrameField frame(double a1) const override {
    Vec p = base_point(a1);
    std::vector<Vec> e = torus_->tangent_frame(p);
    FrameField f;
    f.base = p;
    f.tangent = {dir_(0) * e[0] + dir_(1) * e[1], perp_(0) * e[0] + perp_(1) * e[1]};
    f.normal = torus_->normal_frame(p);
    return f;
  }

  Vec surface_point(const Vec& alpha) const override {
    return torus_->embed(u0_ + alpha(0) * dir_ + alpha(1) * perp_);
  }

  std::vector<Vec> normal_frame_at(const Vec& alpha) const override {
    return torus_->normal_frame(surface_point(alpha));
  }

  FermiPoint invert(const Vec& z) const override {
    ProjectionResult pr = torus_->project(z);
    Eigen::Vector2d du = torus_->wrap(torus_->intrinsic_of(pr.foot) - u0_);
    FermiPoint p;
    p.alpha = Vec(2);
    p.alpha << du.dot(dir_), du.dot(perp_);
    p.beta = pr.offset;
    return p;
  }

  double ball_range(double a1, double eps) const override {
    return std::sqrt(std::max(eps * eps - a1 * a1, 0.0));
  }

  double surface_metric_factor(const Vec&) const override { return 1.0; }

  Vec leaf_H(const Vec&, const Vec& beta) const override {
    Vec h(2);
    h << -1.0 / (torus_->radius1() + beta(0)), -1.0 / (torus_->radius2() + beta(1));
    return h;
  }

  Vec dH_dalpha1(double) const override { return Vec::Zero(2); }

  Eigen::MatrixXd metric_trace_hessian() const override { return Eigen::MatrixXd::Zero(1, 1); }

 private:
  const TorusM* torus_;
  Eigen::Vector2d u0_, dir_, perp_;
};

}  // namespace

std::unique_ptr<FermiChart> Curve::geodesic_chart(const Vec& x0, const Vec& v) const {
  double s0 = nearest_arc(x0);
  if ((x0 - gamma(s0)).norm() > 1e-9 * (1.0 + x0.norm()))
    throw ContractError(name() + ": chart base point is not on the curve");
  double d = v.dot(dgamma(s0));
  if (std::fabs(std::fabs(d) - 1.0) > 1e-9)
    throw ContractError(name() + ": chart velocity is not a unit tangent");
  return std::make_unique<CurveChart>(this, s0, d > 0 ? 1 : -1);
}

namespace detail {

std::unique_ptr<FermiChart> SphereM::geodesic_chart(const Vec& x0, const Vec& v) const {
  check_on_manifold(x0);
  check_unit_tangent(x0, v);
  return std::make_unique<SphereChart>(this, x0, v);
}

std::unique_ptr<FermiChart> TorusM::geodesic_chart(const Vec& x0, const Vec& v) const {
  check_on_manifold(x0);
  check_unit_tangent(x0, v);
  return std::make_unique<TorusChart>(this, x0, v);
}

std::unique_ptr<FermiChart> GraphM::geodesic_chart(const Vec&, const Vec&) const {
  throw UnsupportedError("graph-surface: Fermi charts need closed-form geodesic distance");
}

}  // namespace detail

std::vector<std::vector<Vec>> evolve_normal_frame_ode(const FermiChart& chart, double a_max,
                                                      int steps) {
  const Manifold& M = chart.manifold();
  const int m = M.dim(), k = M.codim();
  auto rhs = [&](double a, const std::vector<Vec>& ns) {
    FrameField f = chart.frame(a);
    std::vector<Vec> d(k, Vec::Zero(M.ambient_dim()));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < m; ++j) {
        Vec II = M.second_fundamental_form(f.base, f.tangent[0], f.tangent[j]);
        d[i] -= ns[i].dot(II) * f.tangent[j];
      }
    }
    return d;
  };
  std::vector<std::vector<Vec>> out;
  std::vector<Vec> ns = chart.frame(0.0).normal;
  out.push_back(ns);
  double h = a_max / steps;
  auto axpy = [&](const std::vector<Vec>& a, double c, const std::vector<Vec>& b) {
    std::vector<Vec> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
    return r;
  };
  for (int s = 0; s < steps; ++s) {
    double a = s * h;
    auto k1 = rhs(a, ns);
    auto k2 = rhs(a + 0.5 * h, axpy(ns, 0.5 * h, k1));
    auto k3 = rhs(a + 0.5 * h, axpy(ns, 0.5 * h, k2));
    auto k4 = rhs(a + h, axpy(ns, h, k3));
    for (int i = 0; i < k; ++i)
      ns[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.push_back(ns);
  }
  return out;
}

}  // namespace tubecurv
