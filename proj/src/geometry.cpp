#include "tubecurv/geometry.hpp"

#include "catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tubecurv {

double Manifold::geodesic_distance(const Vec&, const Vec&) const {
  throw UnsupportedError(name() + ": no closed-form geodesic distance");
}

double Manifold::geodesic_polar_jacobian(double) const {
  throw UnsupportedError(name() + ": geodesic polar jacobian not available");
}

Vec Manifold::mean_curvature(const Vec& x) const {
  return mean_curvature_in_frame(x, tangent_frame(x));
}

Vec Manifold::mean_curvature_in_frame(const Vec& x, const std::vector<Vec>& frame) const {
  Vec h = Vec::Zero(ambient_dim());
  for (const Vec& e : frame) h += second_fundamental_form(x, e, e);
  return h;
}

void Manifold::check_on_manifold(const Vec& x, double tol) const {
  if (x.size() != ambient_dim()) throw ContractError(name() + ": wrong ambient dimension");
  ProjectionResult pr = project(x);
  if ((x - pr.foot).norm() > tol * (1.0 + x.norm()))
    throw ContractError(name() + ": point is not on the manifold");
}

void Manifold::check_unit_tangent(const Vec& x, const Vec& v, double tol) const {
  if (std::fabs(v.norm() - 1.0) > tol) throw ContractError(name() + ": tangent is not unit");
  check_tangent(x, v, tol);
}

void Manifold::check_tangent(const Vec& x, const Vec& w, double tol) const {
  Vec r = w;
  for (const Vec& e : tangent_frame(x)) r -= w.dot(e) * e;
  if (r.norm() > tol * (1.0 + w.norm()))
    throw ContractError(name() + ": vector is not tangent");
}

void Manifold::check_in_reach(const Vec& beta) const {
  if (beta.size() != codim()) throw ContractError(name() + ": wrong normal offset dimension");
  if (beta.norm() >= reach_bound()) throw OutOfReachError(name() + ": offset exceeds reach bound");
}

// ---------------------------------------------------------------------------
// Curve (m = 1) shared machinery

Vec Curve::signed_curvatures(double s) const {
  Vec dd = ddgamma(s);
  std::vector<Vec> ns = normal_frame_s(s);
  Vec k(codim());
  for (int j = 0; j < codim(); ++j) k(j) = ns[j].dot(dd);
  return k;
}

std::vector<Vec> Curve::chart_normal_frame(double s0, int dir, double a) const {
  return normal_frame_s(s0 + dir * a);
}

Vec Curve::embed(const Vec& intrinsic) const {
  if (intrinsic.size() != 1) throw ContractError(name() + ": intrinsic parameter must be 1-d");
  double s = intrinsic(0);
  if (s < arc_min() || s > arc_max()) throw OutOfDomainError(name() + ": arc parameter outside window");
  return gamma(s);
}

Vec Curve::geodesic(const Vec& x, const Vec& v, double t) const {
  double s = nearest_arc(x);
  if ((x - gamma(s)).norm() > 1e-9 * (1.0 + x.norm()))
    throw ContractError(name() + ": base point is not on the curve");
  Vec tangent = dgamma(s);
  double dir = v.dot(tangent);
  if (std::fabs(std::fabs(dir) - 1.0) > 1e-9 || (v - dir * tangent).norm() > 1e-9)
    throw ContractError(name() + ": velocity is not a unit tangent");
  if (std::fabs(t) >= injectivity_bound())
    throw OutOfDomainError(name() + ": geodesic parameter exceeds injectivity bound");
  double s_new = s + (dir > 0 ? t : -t);
  if (s_new < arc_min() || s_new > arc_max())
    throw OutOfDomainError(name() + ": geodesic leaves the arc window");
  return gamma(s_new);
}

double Curve::geodesic_distance(const Vec& x, const Vec& y) const {
  return std::fabs(nearest_arc(x) - nearest_arc(y));
}

ProjectionResult Curve::project(const Vec& z) const {
  double s = nearest_arc(z);
  Vec foot = gamma(s);
  Vec d = z - foot;
  if (d.norm() >= reach_bound()) throw OutOfReachError(name() + ": point beyond reach bound");
  if (std::fabs(d.dot(dgamma(s))) > 1e-8 * (1.0 + d.norm()))
    throw OutOfDomainError(name() + ": projection hit the chart boundary");
  std::vector<Vec> ns = normal_frame_s(s);
  Vec beta(codim());
  for (int j = 0; j < codim(); ++j) beta(j) = d.dot(ns[j]);
  return {foot, beta};
}

std::vector<Vec> Curve::tangent_frame(const Vec& x) const {
  return {dgamma(nearest_arc(x))};
}

std::vector<Vec> Curve::normal_frame(const Vec& x) const {
  return normal_frame_s(nearest_arc(x));
}

Vec Curve::second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const {
  double s = nearest_arc(x);
  Vec tangent = dgamma(s);
  double a1 = w1.dot(tangent);
  double a2 = w2.dot(tangent);
  if ((w1 - a1 * tangent).norm() > 1e-9 * (1.0 + w1.norm()) ||
      (w2 - a2 * tangent).norm() > 1e-9 * (1.0 + w2.norm()))
    throw ContractError(name() + ": arguments of II must be tangent");
  return a1 * a2 * ddgamma(s);
}

double Curve::tube_volume_weight(const Vec& x, const Vec& beta) const {
  check_in_reach(beta);
  double s = nearest_arc(x);
  return 1.0 - beta.dot(signed_curvatures(s));
}

Vec Curve::leaf_mean_curvature(const Vec& x, const Vec& beta) const {
  check_in_reach(beta);
  double s = nearest_arc(x);
  Vec k = signed_curvatures(s);
  return k / (1.0 - beta.dot(k));
}

// ---------------------------------------------------------------------------
// circle

namespace detail {

CircleM::CircleM(double R) : R_(R) {
  if (R <= 0.0) throw ContractError("circle: radius must be positive");
}

std::string CircleM::name() const { return "circle(R=" + std::to_string(R_) + ")"; }

Vec CircleM::gamma(double s) const {
  Vec p(2);
  p << R_ * std::cos(s / R_), R_ * std::sin(s / R_);
  return p;
}

Vec CircleM::dgamma(double s) const {
  Vec p(2);
  p << -std::sin(s / R_), std::cos(s / R_);
  return p;
}

Vec CircleM::ddgamma(double s) const {
  Vec p(2);
  p << -std::cos(s / R_) / R_, -std::sin(s / R_) / R_;
  return p;
}

std::vector<Vec> CircleM::normal_frame_s(double s) const {
  Vec n(2);
  n << std::cos(s / R_), std::sin(s / R_);  // outward, away from the center
  return {n};
}

double CircleM::nearest_arc(const Vec& z) const { return R_ * std::atan2(z(1), z(0)); }

double CircleM::geodesic_distance(const Vec& x, const Vec& y) const {
  double d = std::fabs(nearest_arc(x) - nearest_arc(y));
  return std::min(d, 2.0 * M_PI * R_ - d);
}

ProjectionResult CircleM::project(const Vec& z) const {
  double r = z.norm();
  if (r == 0.0) throw OutOfReachError("circle: center has no unique projection");
  if (std::fabs(r - R_) >= R_) throw OutOfReachError("circle: point beyond reach bound");
  Vec foot = (R_ / r) * z;
  Vec beta(1);
  beta << r - R_;
  return {foot, beta};
}

// ---------------------------------------------------------------------------
// flat line in the plane

LineM::LineM(double window) : window_(window) {}

Vec LineM::gamma(double s) const {
  Vec p(2);
  p << s, 0.0;
  return p;
}

Vec LineM::dgamma(double) const {
  Vec p(2);
  p << 1.0, 0.0;
  return p;
}

Vec LineM::ddgamma(double) const { return Vec::Zero(2); }

std::vector<Vec> LineM::normal_frame_s(double) const {
  Vec n(2);
  n << 0.0, 1.0;
  return {n};
}

// ---------------------------------------------------------------------------
// parabola y = c x^2 / 2, arc-length parametrized via Newton inversion

ParabolaM::ParabolaM(double c, double window) : c_(c), window_(window) {
  if (c == 0.0) throw ContractError("parabola: use planar-line for zero curvature");
}

std::string ParabolaM::name() const { return "parabola(c=" + std::to_string(c_) + ")"; }

double ParabolaM::arc_of_param(double x) const {
  double u = c_ * x;
  return 0.5 * (x * std::sqrt(1.0 + u * u) + std::asinh(u) / c_);
}

double ParabolaM::param_of_arc(double s) const {
  double x = s;
  for (int it = 0; it < 60; ++it) {
    double u = c_ * x;
    double step = (arc_of_param(x) - s) / std::sqrt(1.0 + u * u);
    x -= step;
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(s))) break;
  }
  return x;
}

Vec ParabolaM::position(double x) const {
  Vec p(2);
  p << x, 0.5 * c_ * x * x;
  return p;
}

Vec ParabolaM::gamma(double s) const { return position(param_of_arc(s)); }

Vec ParabolaM::dgamma(double s) const {
  double x = param_of_arc(s);
  double u = c_ * x;
  Vec t(2);
  t << 1.0, u;
  return t / std::sqrt(1.0 + u * u);
}

Vec ParabolaM::ddgamma(double s) const {
  double x = param_of_arc(s);
  double u = c_ * x;
  double den = sqr(1.0 + u * u);
  Vec dd(2);
  dd << -c_ * u / den, c_ / den;
  return dd;
}

std::vector<Vec> ParabolaM::normal_frame_s(double s) const {
  double x = param_of_arc(s);
  double u = c_ * x;
  double sign = c_ >= 0.0 ? 1.0 : -1.0;
  Vec n(2);
  n << sign * u, -sign;
  return {n / std::sqrt(1.0 + u * u)};
}

double ParabolaM::nearest_arc(const Vec& z) const {
  double x_lo = param_of_arc(arc_min());
  double x_hi = param_of_arc(arc_max());
  const int grid = 256;
  double best_x = x_lo, best_d = std::numeric_limits<double>::max();
  for (int i = 0; i <= grid; ++i) {
    double x = x_lo + (x_hi - x_lo) * i / grid;
    double d = (z - position(x)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_x = x;
    }
  }
  double x = best_x;
  for (int it = 0; it < 60; ++it) {
    // stationarity of |z - position(x)|^2 in the graph parameter
    double fx = 0.5 * c_ * x * x;
    double g = (x - z(0)) + (fx - z(1)) * c_ * x;
    double dg = 1.0 + c_ * c_ * x * x + (fx - z(1)) * c_;
    if (dg <= 0.0) break;
    double step = g / dg;
    x -= step;
    if (std::fabs(step) < 1e-15) break;
  }
  x = std::clamp(x, x_lo, x_hi);
  return arc_of_param(x);
}

// ---------------------------------------------------------------------------
// ellipse arc

EllipseM::EllipseM(double a, double b, double t0, double window)
    : a_(a), b_(b), t0_(t0), window_(window) {
  if (a <= 0.0 || b <= 0.0) throw ContractError("ellipse: axes must be positive");
  double r_min = std::numeric_limits<double>::max();
  double span = window_ / std::min(a_, b_) + 0.3;
  for (int i = 0; i <= 400; ++i) {
    double t = t0_ - span + 2.0 * span * i / 400;
    r_min = std::min(r_min, std::pow(speed(t), 3) / (a_ * b_));
  }
  reach_ = 0.9 * r_min;
}

std::string EllipseM::name() const {
  return "ellipse(a=" + std::to_string(a_) + ",b=" + std::to_string(b_) + ")";
}

Vec EllipseM::position(double t) const {
  Vec p(2);
  p << a_ * std::cos(t), b_ * std::sin(t);
  return p;
}

Vec EllipseM::velocity(double t) const {
  Vec v(2);
  v << -a_ * std::sin(t), b_ * std::cos(t);
  return v;
}

double EllipseM::speed(double t) const { return velocity(t).norm(); }

double EllipseM::arc_of_param(double t) const {
  static const Quadrature1D q = gauss_legendre(48);
  double mid = 0.5 * (t0_ + t), half = 0.5 * (t - t0_);
  KahanSum s;
  for (size_t i = 0; i < q.nodes.size(); ++i)
    s.add(q.weights[i] * speed(mid + half * q.nodes[i]));
  return half * s.value();
}

double EllipseM::param_of_arc(double s) const {
  double t = t0_ + s / speed(t0_);
  for (int it = 0; it < 100; ++it) {
    double step = (arc_of_param(t) - s) / speed(t);
    t -= step;
    if (std::fabs(step) < 1e-14 * (1.0 + std::fabs(s))) break;
  }
  return t;
}

Vec EllipseM::gamma(double s) const { return position(param_of_arc(s)); }

Vec EllipseM::dgamma(double s) const {
  double t = param_of_arc(s);
  return velocity(t) / speed(t);
}

Vec EllipseM::ddgamma(double s) const {
  double t = param_of_arc(s);
  double v = speed(t);
  double kappa = a_ * b_ / (v * v * v);  // bends toward the left normal (CCW)
  Vec nl(2);
  nl << -b_ * std::cos(t), -a_ * std::sin(t);
  return kappa * nl / v;
}

std::vector<Vec> EllipseM::normal_frame_s(double s) const {
  double t = param_of_arc(s);
  Vec n(2);
  n << b_ * std::cos(t), a_ * std::sin(t);  // outward
  return {n / speed(t)};
}

double EllipseM::nearest_arc(const Vec& z) const {
  double span = window_ / std::min(a_, b_) + 0.3;
  const int grid = 256;
  double best_t = t0_, best_d = std::numeric_limits<double>::max();
  for (int i = 0; i <= grid; ++i) {
    double t = t0_ - span + 2.0 * span * i / grid;
    double d = (z - position(t)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 60; ++it) {
    Vec r = position(t) - z;
    Vec v = velocity(t);
    Vec acc(2);
    acc << -a_ * std::cos(t), -b_ * std::sin(t);
    double g = r.dot(v);
    double dg = v.squaredNorm() + r.dot(acc);
    if (dg <= 0.0) break;
    double step = g / dg;
    t -= step;
    if (std::fabs(step) < 1e-15) break;
  }
  return arc_of_param(t);
}

// ---------------------------------------------------------------------------
// helix

HelixM::HelixM(double a, double b, double window)
    : a_(a), b_(b), c_(std::sqrt(a * a + b * b)), window_(window) {
  if (a <= 0.0) throw ContractError("helix: radius must be positive");
}

std::string HelixM::name() const {
  return "helix(a=" + std::to_string(a_) + ",b=" + std::to_string(b_) + ")";
}

Vec HelixM::gamma(double s) const {
  double phi = s / c_;
  Vec p(3);
  p << a_ * std::cos(phi), a_ * std::sin(phi), b_ * s / c_;
  return p;
}

Vec HelixM::dgamma(double s) const {
  double phi = s / c_;
  Vec v(3);
  v << -(a_ / c_) * std::sin(phi), (a_ / c_) * std::cos(phi), b_ / c_;
  return v;
}

Vec HelixM::ddgamma(double s) const {
  double phi = s / c_;
  Vec v(3);
  v << -(a_ / (c_ * c_)) * std::cos(phi), -(a_ / (c_ * c_)) * std::sin(phi), 0.0;
  return v;
}

std::vector<Vec> HelixM::normal_frame_s(double s) const {
  double phi = s / c_;
  Vec n(3), bvec(3);
  n << -std::cos(phi), -std::sin(phi), 0.0;            // Frenet normal
  bvec << (b_ / c_) * std::sin(phi), -(b_ / c_) * std::cos(phi), a_ / c_;  // binormal
  return {n, bvec};
}

std::vector<Vec> HelixM::chart_normal_frame(double s0, int dir, double a) const {
  double s = s0 + dir * a;
  std::vector<Vec> fr = normal_frame_s(s);
  double th = dir * torsion() * a;
  Vec n1 = std::cos(th) * fr[0] - std::sin(th) * fr[1];
  Vec n2 = std::sin(th) * fr[0] + std::cos(th) * fr[1];
  return {n1, n2};
}

double HelixM::nearest_arc(const Vec& z) const {
  const int grid = 512;
  double best_s = 0.0, best_d = std::numeric_limits<double>::max();
  for (int i = 0; i <= grid; ++i) {
    double s = arc_min() + (arc_max() - arc_min()) * i / grid;
    double d = (z - gamma(s)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  double s = best_s;
  for (int it = 0; it < 60; ++it) {
    Vec r = gamma(s) - z;
    double g = r.dot(dgamma(s));
    double dg = 1.0 + r.dot(ddgamma(s));
    if (dg <= 0.0) break;
    double step = g / dg;
    s -= step;
    if (std::fabs(step) < 1e-15) break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// round sphere S^m(R) in R^{m+1}

SphereM::SphereM(int m, double R) : m_(m), R_(R) {
  if (m < 1) throw ContractError("sphere: dimension must be positive");
  if (R <= 0.0) throw ContractError("sphere: radius must be positive");
}

std::string SphereM::name() const {
  return "sphere(m=" + std::to_string(m_) + ",R=" + std::to_string(R_) + ")";
}

Vec SphereM::embed(const Vec& intrinsic) const {
  if (intrinsic.size() != m_) throw ContractError("sphere: intrinsic parameter must be m-d");
  double rho = intrinsic.norm();
  if (rho >= injectivity_bound()) throw OutOfDomainError("sphere: chart parameter too large");
  Vec north = Vec::Zero(m_ + 1);
  north(m_) = R_;
  if (rho == 0.0) return north;
  Vec dir = Vec::Zero(m_ + 1);
  dir.head(m_) = intrinsic / rho;
  return std::cos(rho / R_) * north + R_ * std::sin(rho / R_) * dir;
}

Vec SphereM::geodesic(const Vec& x, const Vec& v, double t) const {
  check_on_manifold(x);
  check_unit_tangent(x, v);
  if (std::fabs(t) >= injectivity_bound())
    throw OutOfDomainError("sphere: geodesic parameter exceeds injectivity bound");
  return std::cos(t / R_) * x + R_ * std::sin(t / R_) * v;
}

double SphereM::geodesic_distance(const Vec& x, const Vec& y) const {
  double u = x.dot(y);
  Vec w = y - (u / (R_ * R_)) * x;
  return R_ * std::atan2(w.norm() * R_, u);
}

ProjectionResult SphereM::project(const Vec& z) const {
  double r = z.norm();
  if (r == 0.0) throw OutOfReachError("sphere: center has no unique projection");
  if (std::fabs(r - R_) >= R_) throw OutOfReachError("sphere: point beyond reach bound");
  Vec foot = (R_ / r) * z;
  Vec beta(1);
  beta << r - R_;
  return {foot, beta};
}

std::vector<Vec> SphereM::tangent_frame(const Vec& x) const {
  std::vector<Vec> frame;
  Vec xn = x / x.norm();
  for (int i = 0; i <= m_ && static_cast<int>(frame.size()) < m_; ++i) {
    Vec v = Vec::Zero(m_ + 1);
    v(i) = 1.0;
    v -= v.dot(xn) * xn;
    for (const Vec& f : frame) v -= v.dot(f) * f;
    double nv = v.norm();
    if (nv > 0.1) frame.push_back(v / nv);
  }
  return frame;
}

std::vector<Vec> SphereM::normal_frame(const Vec& x) const { return {x / x.norm()}; }

Vec SphereM::second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const {
  check_tangent(x, w1);
  check_tangent(x, w2);
  return -(w1.dot(w2) / R_) * (x / x.norm());
}

double SphereM::tube_volume_weight(const Vec&, const Vec& beta) const {
  check_in_reach(beta);
  return std::pow(1.0 + beta(0) / R_, m_);
}

Vec SphereM::leaf_mean_curvature(const Vec&, const Vec& beta) const {
  check_in_reach(beta);
  Vec h(1);
  h << -m_ / (R_ + beta(0));
  return h;
}

double SphereM::geodesic_polar_jacobian(double r) const {
  if (m_ != 2) throw UnsupportedError("sphere: polar jacobian implemented for m = 2 only");
  return R_ * std::sin(r / R_);
}

// ---------------------------------------------------------------------------
// flat torus S^1(R1) x S^1(R2) in R^4

TorusM::TorusM(double R1, double R2) : R1_(R1), R2_(R2) {
  if (R1 <= 0.0 || R2 <= 0.0) throw ContractError("flat-torus: radii must be positive");
}

std::string TorusM::name() const {
  return "flat-torus(R1=" + std::to_string(R1_) + ",R2=" + std::to_string(R2_) + ")";
}

Vec TorusM::embed(const Vec& intrinsic) const {
  if (intrinsic.size() != 2) throw ContractError("flat-torus: intrinsic parameter must be 2-d");
  double t1 = intrinsic(0) / R1_, t2 = intrinsic(1) / R2_;
  Vec p(4);
  p << R1_ * std::cos(t1), R1_ * std::sin(t1), R2_ * std::cos(t2), R2_ * std::sin(t2);
  return p;
}

Eigen::Vector2d TorusM::intrinsic_of(const Vec& x) const {
  return {R1_ * std::atan2(x(1), x(0)), R2_ * std::atan2(x(3), x(2))};
}

Eigen::Vector2d TorusM::wrap(const Eigen::Vector2d& du) const {
  auto wrap1 = [](double d, double period) {
    d = std::fmod(d, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
  };
  return {wrap1(du(0), 2.0 * M_PI * R1_), wrap1(du(1), 2.0 * M_PI * R2_)};
}

Vec TorusM::geodesic(const Vec& x, const Vec& v, double t) const {
  check_on_manifold(x);
  check_unit_tangent(x, v);
  if (std::fabs(t) >= 2.0 * M_PI * std::min(R1_, R2_))
    throw OutOfDomainError("flat-torus: geodesic parameter too large");
  std::vector<Vec> e = tangent_frame(x);
  Eigen::Vector2d u = intrinsic_of(x);
  Eigen::Vector2d c{v.dot(e[0]), v.dot(e[1])};
  Vec unew(2);
  unew << u(0) + t * c(0), u(1) + t * c(1);
  return embed(unew);
}

double TorusM::geodesic_distance(const Vec& x, const Vec& y) const {
  Eigen::Vector2d du = wrap(intrinsic_of(y) - intrinsic_of(x));
  return du.norm();
}

ProjectionResult TorusM::project(const Vec& z) const {
  double r1 = std::hypot(z(0), z(1));
  double r2 = std::hypot(z(2), z(3));
  if (r1 == 0.0 || r2 == 0.0) throw OutOfReachError("flat-torus: axis point has no projection");
  Vec beta(2);
  beta << r1 - R1_, r2 - R2_;
  if (beta.norm() >= reach_bound()) throw OutOfReachError("flat-torus: point beyond reach bound");
  Vec foot(4);
  foot << R1_ * z(0) / r1, R1_ * z(1) / r1, R2_ * z(2) / r2, R2_ * z(3) / r2;
  return {foot, beta};
}

std::vector<Vec> TorusM::tangent_frame(const Vec& x) const {
  double t1 = std::atan2(x(1), x(0)), t2 = std::atan2(x(3), x(2));
  Vec e1(4), e2(4);
  e1 << -std::sin(t1), std::cos(t1), 0.0, 0.0;
  e2 << 0.0, 0.0, -std::sin(t2), std::cos(t2);
  return {e1, e2};
}

std::vector<Vec> TorusM::normal_frame(const Vec& x) const {
  double t1 = std::atan2(x(1), x(0)), t2 = std::atan2(x(3), x(2));
  Vec n1(4), n2(4);
  n1 << std::cos(t1), std::sin(t1), 0.0, 0.0;
  n2 << 0.0, 0.0, std::cos(t2), std::sin(t2);
  return {n1, n2};
}

Vec TorusM::second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const {
  check_tangent(x, w1);
  check_tangent(x, w2);
  std::vector<Vec> e = tangent_frame(x);
  std::vector<Vec> n = normal_frame(x);
  double a1 = w1.dot(e[0]), b1 = w1.dot(e[1]);
  double a2 = w2.dot(e[0]), b2 = w2.dot(e[1]);
  return -(a1 * a2 / R1_) * n[0] - (b1 * b2 / R2_) * n[1];
}

double TorusM::tube_volume_weight(const Vec&, const Vec& beta) const {
  check_in_reach(beta);
  return (1.0 + beta(0) / R1_) * (1.0 + beta(1) / R2_);
}

Vec TorusM::leaf_mean_curvature(const Vec&, const Vec& beta) const {
  check_in_reach(beta);
  Vec h(2);
  h << -1.0 / (R1_ + beta(0)), -1.0 / (R2_ + beta(1));
  return h;
}

double TorusM::geodesic_polar_jacobian(double r) const { return r; }

// ---------------------------------------------------------------------------
// graph surface z = f(x, y), RK4 geodesics with finite-difference Christoffels

GraphM::GraphM(double fxx, double fyy, double fxy, double window) : window_(window) {
  hess_ << fxx, fxy, fxy, fyy;
  double max_k = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      Eigen::Vector2d p{-window + 2.0 * window * i / 20, -window + 2.0 * window * j / 20};
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape_matrix(p));
      max_k = std::max({max_k, std::fabs(es.eigenvalues()(0)), std::fabs(es.eigenvalues()(1))});
    }
  }
  reach_ = max_k > 0.0 ? 0.9 / max_k : 1e9;
}

std::string GraphM::name() const {
  return "graph-surface(fxx=" + std::to_string(hess_(0, 0)) + ",fyy=" + std::to_string(hess_(1, 1)) +
         ",fxy=" + std::to_string(hess_(0, 1)) + ")";
}

double GraphM::f(const Eigen::Vector2d& p) const { return 0.5 * p.dot(hess_ * p); }

Eigen::Vector2d GraphM::grad(const Eigen::Vector2d& p) const { return hess_ * p; }

Eigen::Matrix2d GraphM::metric(const Eigen::Vector2d& p) const {
  Eigen::Vector2d g = grad(p);
  return Eigen::Matrix2d::Identity() + g * g.transpose();
}

Eigen::Matrix2d GraphM::shape_matrix(const Eigen::Vector2d& p) const {
  Eigen::Vector2d g = grad(p);
  double w = std::sqrt(1.0 + g.squaredNorm());
  // orthonormalize the coordinate tangent frame
  Vec x = embed(Vec(p));
  std::vector<Vec> e = tangent_frame(x);
  Eigen::Matrix2d b;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d ei{e[i](0), e[i](1)};
      Eigen::Vector2d ej{e[j](0), e[j](1)};
      b(i, j) = ei.dot(hess_ * ej) / w;
    }
  }
  return b;
}

Vec GraphM::embed(const Vec& intrinsic) const {
  if (intrinsic.size() != 2) throw ContractError("graph-surface: intrinsic parameter must be 2-d");
  if (std::fabs(intrinsic(0)) > window_ || std::fabs(intrinsic(1)) > window_)
    throw OutOfDomainError("graph-surface: parameter outside window");
  Eigen::Vector2d p{intrinsic(0), intrinsic(1)};
  Vec x(3);
  x << p(0), p(1), f(p);
  return x;
}

Vec GraphM::geodesic(const Vec& x, const Vec& v, double t) const {
  check_on_manifold(x);
  check_unit_tangent(x, v);
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::Vector2d q{v(0), v(1)};
  const double fd_h = 1e-5;
  auto christoffel = [&](const Eigen::Vector2d& pt) {
    Eigen::Matrix2d dg[2];
    for (int l = 0; l < 2; ++l) {
      Eigen::Vector2d hi = pt, lo = pt;
      hi(l) += fd_h;
      lo(l) -= fd_h;
      dg[l] = (metric(hi) - metric(lo)) / (2.0 * fd_h);
    }
    Eigen::Matrix2d ginv = metric(pt).inverse();
    std::array<Eigen::Matrix2d, 2> gam;
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l) s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
          gam[k](i, j) = 0.5 * s;
        }
      }
    }
    return gam;
  };
  auto accel = [&](const Eigen::Vector2d& pt, const Eigen::Vector2d& vel) {
    auto gam = christoffel(pt);
    return Eigen::Vector2d{-vel.dot(gam[0] * vel), -vel.dot(gam[1] * vel)};
  };
  int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(t) / 1e-3)));
  double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    Eigen::Vector2d k1p = q, k1q = accel(p, q);
    Eigen::Vector2d k2p = q + 0.5 * h * k1q, k2q = accel(p + 0.5 * h * k1p, q + 0.5 * h * k1q);
    Eigen::Vector2d k3p = q + 0.5 * h * k2q, k3q = accel(p + 0.5 * h * k2p, q + 0.5 * h * k2q);
    Eigen::Vector2d k4p = q + h * k3q, k4q = accel(p + h * k3p, q + h * k3q);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    if (std::fabs(p(0)) > window_ || std::fabs(p(1)) > window_)
      throw OutOfDomainError("graph-surface: geodesic leaves the window");
  }
  return embed(Vec(p));
}

double GraphM::geodesic_distance(const Vec&, const Vec&) const {
  throw UnsupportedError("graph-surface: no closed-form geodesic distance");
}

ProjectionResult GraphM::project(const Vec& z) const {
  Eigen::Vector2d p{z(0), z(1)};  // vertical drop
  for (int it = 0; it < 50; ++it) {
    Eigen::Vector2d g = grad(p);
    Eigen::Vector3d e{p(0), p(1), f(p)};
    Eigen::Vector3d r{z(0) - e(0), z(1) - e(1), z(2) - e(2)};
    Eigen::Matrix<double, 3, 2> jac;
    jac << 1, 0, 0, 1, g(0), g(1);
    Eigen::Vector2d gradF = -jac.transpose() * r;
    Eigen::Matrix2d hessF = jac.transpose() * jac - r(2) * hess_;
    Eigen::Vector2d step = hessF.ldlt().solve(gradF);
    p -= step;
    if (step.norm() < 1e-12) break;
  }
  if (std::fabs(p(0)) > window_ || std::fabs(p(1)) > window_)
    throw OutOfDomainError("graph-surface: projection outside window");
  Vec foot = embed(Vec(p));
  Vec d = z - foot;
  if (d.norm() >= reach_) throw OutOfReachError("graph-surface: point beyond reach bound");
  Vec n = normal_frame(foot)[0];
  Vec beta(1);
  beta << d.dot(n);
  return {foot, beta};
}

std::vector<Vec> GraphM::tangent_frame(const Vec& x) const {
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::Vector2d g = grad(p);
  Vec e1(3), e2(3);
  e1 << 1.0, 0.0, g(0);
  e1 /= e1.norm();
  e2 << 0.0, 1.0, g(1);
  e2 -= e2.dot(e1) * e1;
  e2 /= e2.norm();
  return {e1, e2};
}

std::vector<Vec> GraphM::normal_frame(const Vec& x) const {
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::Vector2d g = grad(p);
  Vec n(3);
  n << -g(0), -g(1), 1.0;
  return {n / n.norm()};
}

Vec GraphM::second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const {
  check_tangent(x, w1);
  check_tangent(x, w2);
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::Vector2d g = grad(p);
  double w = std::sqrt(1.0 + g.squaredNorm());
  Eigen::Vector2d u1{w1(0), w1(1)}, u2{w2(0), w2(1)};
  return (u1.dot(hess_ * u2) / w) * normal_frame(x)[0];
}

double GraphM::tube_volume_weight(const Vec& x, const Vec& beta) const {
  check_in_reach(beta);
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::Matrix2d s = shape_matrix(p);
  return (Eigen::Matrix2d::Identity() - beta(0) * s).determinant();
}

Vec GraphM::leaf_mean_curvature(const Vec& x, const Vec& beta) const {
  check_in_reach(beta);
  Eigen::Vector2d p{x(0), x(1)};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape_matrix(p));
  Vec h(1);
  h << es.eigenvalues()(0) / (1.0 - beta(0) * es.eigenvalues()(0)) +
           es.eigenvalues()(1) / (1.0 - beta(0) * es.eigenvalues()(1));
  return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// factories

std::unique_ptr<Manifold> make_circle(double R) { return std::make_unique<detail::CircleM>(R); }

std::unique_ptr<Manifold> make_planar_line(double window) {
  return std::make_unique<detail::LineM>(window);
}

std::unique_ptr<Manifold> make_parabola(double c, double window) {
  return std::make_unique<detail::ParabolaM>(c, window);
}

std::unique_ptr<Manifold> make_ellipse(double a, double b, double t0, double window) {
  return std::make_unique<detail::EllipseM>(a, b, t0, window);
}

std::unique_ptr<Manifold> make_helix(double a, double b, double window) {
  return std::make_unique<detail::HelixM>(a, b, window);
}

std::unique_ptr<Manifold> make_sphere(int m, double R) {
  return std::make_unique<detail::SphereM>(m, R);
}

std::unique_ptr<Manifold> make_flat_torus(double R1, double R2) {
  return std::make_unique<detail::TorusM>(R1, R2);
}

std::unique_ptr<Manifold> make_graph_surface(double fxx, double fyy, double fxy, double window) {
  return std::make_unique<detail::GraphM>(fxx, fyy, fxy, window);
}

}  // namespace tubecurv
