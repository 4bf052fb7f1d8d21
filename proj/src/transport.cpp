#include "tubecurv/transport.hpp"

#include "tubecurv/parallel.hpp"
#include "tubecurv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tubecurv {

namespace {

double weight_sum(const DiscreteMeasure& m) {
  KahanSum s;
  for (double w : m.weights) s.add(w);
  return s.value();
}

// Orders atoms along the dominant axis of the joint cloud; the
// northwest-corner start is then a near-monotone matching.
Vec principal_axis(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const int d = mu.ambient_dim();
  Vec mean = Vec::Zero(d);
  for (const Vec& p : mu.points) mean += p;
  for (const Vec& p : nu.points) mean += p;
  mean /= static_cast<double>(mu.points.size() + nu.points.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const Vec& p : mu.points) cov += (p - mean) * (p - mean).transpose();
  for (const Vec& p : nu.points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  return es.eigenvectors().col(d - 1);
}

}  // namespace

W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.points.empty() || nu.points.empty()) throw ContractError("w1_exact: empty measure");
  if (mu.ambient_dim() != nu.ambient_dim())
    throw ContractError("w1_exact: ambient dimensions differ");
  if (std::fabs(weight_sum(mu) - weight_sum(nu)) > 1e-9)
    throw ContractError("w1_exact: weight sums differ by more than 1e-9");

  const int ns = static_cast<int>(mu.points.size());
  const int nt = static_cast<int>(nu.points.size());
  double maxdist = 0.0;
  for (const Vec& p : mu.points) maxdist = std::max(maxdist, p.norm());
  for (const Vec& q : nu.points) maxdist = std::max(maxdist, q.norm());
  maxdist = std::max(1e-300, 2.0 * maxdist);

  bool uniform = ns == nt;
  if (uniform) {
    for (double w : mu.weights) uniform = uniform && std::fabs(w - mu.weights[0]) < 1e-15;
    for (double w : nu.weights) uniform = uniform && std::fabs(w - nu.weights[0]) < 1e-15;
  }

  // Solvers touch each pair many times; cache the distance matrix when it fits.
  const std::int64_t pairs = static_cast<std::int64_t>(ns) * nt;
  std::vector<double> cached;
  if (pairs <= 20000000) {
    cached.resize(pairs);
    par::for_each(pairs, [&](std::int64_t idx) {
      cached[idx] = (mu.points[idx / nt] - nu.points[idx % nt]).norm();
    });
  }

  W1Result res;
  if (uniform) {
    std::vector<int> col_of_row;
    CostFn cost = cached.empty()
                      ? CostFn([&](int i, int j) { return (mu.points[i] - nu.points[j]).norm(); })
                      : CostFn([&](int i, int j) {
                          return cached[static_cast<std::int64_t>(i) * nt + j];
                        });
    double total = solve_assignment(ns, cost, col_of_row);
    res.cost = total / ns;
    for (int i = 0; i < ns; ++i) res.plan.flows.push_back({i, col_of_row[i], mu.weights[i]});
    res.plan.cost = res.cost;
    res.plan.dual_residual = 0.0;
    res.cost = res.plan.cost;
    return res;
  }

  Vec axis = principal_axis(mu, nu);
  std::vector<int> src_order(ns), dst_order(nt);
  std::iota(src_order.begin(), src_order.end(), 0);
  std::iota(dst_order.begin(), dst_order.end(), 0);
  std::sort(src_order.begin(), src_order.end(),
            [&](int a, int b) { return mu.points[a].dot(axis) < mu.points[b].dot(axis); });
  std::sort(dst_order.begin(), dst_order.end(),
            [&](int a, int b) { return nu.points[a].dot(axis) < nu.points[b].dot(axis); });

  std::vector<double> supply(ns), demand(nt);
  for (int i = 0; i < ns; ++i) supply[i] = mu.weights[src_order[i]];
  for (int j = 0; j < nt; ++j) demand[j] = nu.weights[dst_order[j]];
  // balance exactly against rounding drift in the inputs
  double sa = weight_sum(mu), sb = weight_sum(nu);
  for (double& b : demand) b *= sa / sb;

  CostFn cost = cached.empty()
                    ? CostFn([&](int i, int j) {
                        return (mu.points[src_order[i]] - nu.points[dst_order[j]]).norm();
                      })
                    : CostFn([&](int i, int j) {
                        return cached[static_cast<std::int64_t>(src_order[i]) * nt + dst_order[j]];
                      });
  TransportPlan plan = solve_transportation(supply, demand, cost, maxdist);
  if (plan.dual_residual > 1e-8 * maxdist)
    throw MisconfigurationError("w1_exact: optimality certificate failed");
  for (auto& f : plan.flows) {
    f.i = src_order[f.i];
    f.j = dst_order[f.j];
  }
  res.plan = std::move(plan);
  res.cost = res.plan.cost;
  return res;
}

std::string plan_to_text(const TransportPlan& plan) {
  std::ostringstream os;
  os << "cost " << format_double(plan.cost) << "\n";
  for (const auto& f : plan.flows)
    os << f.i << " " << f.j << " " << format_double(f.mass) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// the proposed transport map

FermiPoint TransportMapT::apply_coords(const FermiPoint& p) const {
  FermiPoint q;
  q.alpha = p.alpha;
  q.alpha(0) = delta - p.alpha(0);
  q.beta = p.beta;
  const double d2a = delta - 2.0 * p.alpha(0);
  for (int i = 0; i < q.beta.size(); ++i)
    q.beta(i) -= 0.5 * (sigma * sigma - sqr(p.beta(i))) * d2a * dH(i);
  return q;
}

Vec TransportMapT::apply(const Vec& z) const { return chart->map(apply_coords(chart->invert(z))); }

double TransportMapT::coord_jacobian(const FermiPoint& p) const {
  const double d2a = delta - 2.0 * p.alpha(0);
  double det = 1.0;
  for (int i = 0; i < p.beta.size(); ++i) det *= 1.0 + p.beta(i) * d2a * dH(i);
  return std::fabs(det);
}

TransportMapT make_transport_map(const FermiChart& chart, double delta, double sigma) {
  TransportMapT t;
  t.chart = &chart;
  t.delta = delta;
  t.sigma = sigma;
  t.dH = chart.dH_dalpha1(1e-4 * delta);
  return t;
}

namespace {

void check_sandwich_pre(const FermiChart& chart, double delta, double sigma, double eps,
                        int order) {
  if (!(delta > 0.0)) throw ContractError("transport bounds: delta must be positive");
  if (std::max(sigma, eps) > 0.25 * delta * (1.0 + 1e-12))
    throw ContractError("transport bounds: require sigma v eps <= delta / 4");
  if (order < 8) throw ContractError("transport bounds: quadrature order must be >= 8");
  if (delta + eps >= chart.delta_bound())
    throw OutOfDomainError("transport bounds: delta exceeds the chart bound");
}

TubeSegmentSpec segment_at(const FermiChart& chart, double a1, double sigma, double eps) {
  TubeSegmentSpec s;
  s.manifold = &chart.manifold();
  s.chart = &chart;
  s.center_a1 = a1;
  s.sigma = sigma;
  s.eps = eps;
  return s;
}

}  // namespace

double upper_bound_via_T(const FermiChart& chart, double delta, double sigma, double eps,
                         int order) {
  check_sandwich_pre(chart, delta, sigma, eps, order);
  QuadratureMeasure q = quadrature_measure(segment_at(chart, 0.0, sigma, eps), order);
  TransportMapT t = make_transport_map(chart, delta, sigma);
  return par::sum_indexed(static_cast<std::int64_t>(q.points.size()), [&](std::int64_t i) {
    return q.weights[i] * (t.apply(q.points[i]) - q.points[i]).norm();
  });
}

namespace {

// f(z) = <z - x0, p(alpha-hat, beta)> with the normalized chart displacement
// p = (phi(delta, ahat, beta) - phi(0, ahat, beta)) / |...|.
class DualTestFunction {
 public:
  DualTestFunction(const FermiChart& chart, double delta)
      : chart_(chart), delta_(delta), x0_(chart.base_point(0.0)) {}

  double operator()(const Vec& z) const {
    FermiPoint p = chart_.invert(z);
    return (z - x0_).dot(direction(p));
  }

  Vec direction(const FermiPoint& p) const {
    FermiPoint lo = p, hi = p;
    lo.alpha(0) = 0.0;
    hi.alpha(0) = delta_;
    Vec d = chart_.map(hi) - chart_.map(lo);
    return d / d.norm();
  }

  double grad_norm(const Vec& z, double h) const {
    const int d = static_cast<int>(z.size());
    double s = 0.0;
    for (int c = 0; c < d; ++c) {
      Vec zp = z, zm = z;
      zp(c) += h;
      zm(c) -= h;
      s += sqr(((*this)(zp) - (*this)(zm)) / (2.0 * h));
    }
    return std::sqrt(s);
  }

 private:
  const FermiChart& chart_;
  double delta_;
  Vec x0_;
};

}  // namespace

double dual_lower_bound(const FermiChart& chart, double delta, double sigma, double eps,
                        int order) {
  check_sandwich_pre(chart, delta, sigma, eps, order);
  QuadratureMeasure qx = quadrature_measure(segment_at(chart, 0.0, sigma, eps), order);
  QuadratureMeasure qy = quadrature_measure(segment_at(chart, delta, sigma, eps), order);
  DualTestFunction f(chart, delta);

  double ly = par::sum_indexed(static_cast<std::int64_t>(qy.points.size()), [&](std::int64_t i) {
    return qy.weights[i] * f(qy.points[i]);
  });
  double lx = par::sum_indexed(static_cast<std::int64_t>(qx.points.size()), [&](std::int64_t i) {
    return qx.weights[i] * f(qx.points[i]);
  });

  // sup |grad f| over a grid spanning both supports (the 1-Lipschitz
  // normalization measured at the 1 + O(delta^3) level)
  const Manifold& M = chart.manifold();
  const int m = M.dim(), k = M.codim();
  std::vector<Vec> grid;
  const double fd_h = 1e-6 * std::max(delta, 1e-3);
  auto push_node = [&](double a1, const Vec& ahat, const Vec& beta) {
    FermiPoint p;
    p.alpha = Vec(m);
    p.alpha(0) = a1;
    if (m > 1) p.alpha.tail(m - 1) = ahat;
    p.beta = beta;
    grid.push_back(chart.map(p));
  };
  int n1 = m == 1 ? (k == 1 ? 100 : 48) : 32;
  int nh = 8;   // per alpha-hat axis
  int nb = k == 1 ? (m == 1 ? 100 : 24) : 10;  // per beta axis
  for (int ia = 0; ia < n1; ++ia) {
    double a1 = -eps + (delta + 2.0 * eps) * ia / (n1 - 1.0);
    std::vector<Vec> ahats;
    if (m == 1) {
      ahats.push_back(Vec::Zero(0));
    } else {
      for (int ih = 0; ih < nh; ++ih)
        ahats.push_back(Vec::Constant(1, 0.98 * eps * (2.0 * ih / (nh - 1.0) - 1.0)));
    }
    std::vector<Vec> betas;
    if (k == 1) {
      for (int ib = 0; ib < nb; ++ib)
        betas.push_back(Vec::Constant(1, 0.98 * sigma * (2.0 * ib / (nb - 1.0) - 1.0)));
    } else {
      for (int ib = 0; ib < nb; ++ib) {
        for (int ang = 0; ang < nb; ++ang) {
          double rho = 0.98 * sigma * ib / (nb - 1.0);
          double ph = 2.0 * M_PI * ang / nb;
          Vec b(2);
          b << rho * std::cos(ph), rho * std::sin(ph);
          betas.push_back(b);
        }
      }
    }
    for (const Vec& ah : ahats)
      for (const Vec& b : betas) push_node(a1, ah, b);
  }
  std::vector<double> gn(grid.size());
  par::for_each(static_cast<std::int64_t>(grid.size()),
                [&](std::int64_t i) { gn[i] = f.grad_norm(grid[i], fd_h); });
  double sup_grad = *std::max_element(gn.begin(), gn.end());
  return (ly - lx) / sup_grad;
}

double density_ratio_check(const FermiChart& chart, double delta, double sigma, double eps,
                           int n_probe) {
  check_sandwich_pre(chart, delta, sigma, eps, 8);
  const Manifold& M = chart.manifold();
  const int m = M.dim(), k = M.codim();
  const int order = 12;
  double vx = quadrature_measure(segment_at(chart, 0.0, sigma, eps), order).total_mass;
  double vy = quadrature_measure(segment_at(chart, delta, sigma, eps), order).total_mass;
  TransportMapT t = make_transport_map(chart, delta, sigma);

  // exact ambient density of the chart at (alpha, beta), up to the shared
  // vol_M factor: tube weight (canonical frame) times the surface metric
  auto chart_density = [&](const FermiPoint& p) {
    Vec foot = chart.surface_point(p.alpha);
    std::vector<Vec> nc = chart.normal_frame_at(p.alpha);
    Vec off = Vec::Zero(M.ambient_dim());
    for (int j = 0; j < k; ++j) off += p.beta(j) * nc[j];
    std::vector<Vec> can = M.normal_frame(foot);
    Vec bc(k);
    for (int j = 0; j < k; ++j) bc(j) = off.dot(can[j]);
    return M.tube_volume_weight(foot, bc) * chart.surface_metric_factor(p.alpha);
  };

  RngStream rng(0x746265ULL, stream_tag({0xd17aULL}));
  double worst = 0.0;
  for (int i = 0; i < n_probe; ++i) {
    FermiPoint p;
    p.alpha = Vec::Zero(m);
    p.alpha(0) = 0.98 * eps * (2.0 * rng.uniform() - 1.0);
    if (m == 2) {
      double range = chart.ball_range(p.alpha(0), eps);
      p.alpha(1) = 0.98 * range * (2.0 * rng.uniform() - 1.0);
    }
    if (k == 1) {
      p.beta = Vec::Constant(1, 0.98 * sigma * (2.0 * rng.uniform() - 1.0));
    } else {
      double rho = 0.98 * sigma * std::sqrt(rng.uniform());
      double ph = 2.0 * M_PI * rng.uniform();
      p.beta = Vec(2);
      p.beta << rho * std::cos(ph), rho * std::sin(ph);
    }
    FermiPoint q = t.apply_coords(p);
    double ratio = (vy / vx) * chart_density(p) / (t.coord_jacobian(p) * chart_density(q));
    worst = std::max(worst, std::fabs(ratio - 1.0));
  }
  return worst;
}

}  // namespace tubecurv
