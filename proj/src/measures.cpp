#include "tubecurv/measures.hpp"

#include "tubecurv/parallel.hpp"

#include <cmath>
#include <sstream>

namespace tubecurv {

void TubeSegmentSpec::validate() const {
  if (!manifold || !chart) throw ContractError("tube spec: missing manifold or chart");
  if (!(sigma > 0.0)) throw ContractError("tube spec: sigma must be positive");
  if (sigma >= manifold->reach_bound())
    throw OutOfReachError("tube spec: sigma exceeds the reach bound");
  if (!(eps > 0.0) || eps >= manifold->injectivity_bound())
    throw ContractError("tube spec: eps outside (0, injectivity bound)");
}

void DiscreteMeasure::check_invariants(const TubeSegmentSpec* spec) const {
  if (points.size() != weights.size())
    throw ContractError("discrete measure: points/weights size mismatch");
  KahanSum s;
  for (double w : weights) {
    if (w < 0.0) throw ContractError("discrete measure: negative weight");
    s.add(w);
  }
  if (std::fabs(s.value() - 1.0) > 1e-12)
    throw ContractError("discrete measure: weights do not sum to 1");
  if (spec) {
    for (const Vec& p : points)
      if (!tube_contains(*spec, p))
        throw ContractError("discrete measure: atom outside the tube segment");
  }
}

std::string DiscreteMeasure::to_text() const {
  std::ostringstream os;
  os << ambient_dim() << " " << points.size() << "\n";
  for (size_t i = 0; i < points.size(); ++i) {
    for (int j = 0; j < points[i].size(); ++j) os << format_double(points[i](j)) << " ";
    os << format_double(weights[i]) << "\n";
  }
  return os.str();
}

DiscreteMeasure DiscreteMeasure::from_text(const std::string& text) {
  std::istringstream is(text);
  int dim = 0;
  size_t count = 0;
  if (!(is >> dim >> count)) throw ContractError("discrete measure: bad header");
  DiscreteMeasure m;
  m.points.reserve(count);
  m.weights.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Vec p(dim);
    for (int j = 0; j < dim; ++j)
      if (!(is >> p(j))) throw ContractError("discrete measure: truncated row");
    double w;
    if (!(is >> w)) throw ContractError("discrete measure: missing weight");
    m.points.push_back(std::move(p));
    m.weights.push_back(w);
  }
  return m;
}

// ---------------------------------------------------------------------------
// quadrature over the tube segment

namespace {

struct RawNode {
  Vec foot;
  Vec beta;
  double w;
};

// Nodes and weights for the geodesic eps-ball around the segment center,
// in polar form with the exact radial volume factor.
std::vector<std::pair<Vec, double>> alpha_ball_nodes(const TubeSegmentSpec& spec, int order) {
  const Manifold& M = *spec.manifold;
  std::vector<std::pair<Vec, double>> out;
  if (M.dim() == 1) {
    Quadrature1D q = gauss_legendre(order);
    for (int i = 0; i < order; ++i) {
      double a = spec.eps * q.nodes[i];
      out.emplace_back(spec.chart->base_point(spec.center_a1 + a), spec.eps * q.weights[i]);
    }
    return out;
  }
  if (M.dim() != 2)
    throw UnsupportedError("quadrature_measure: implemented for m <= 2 catalogue entries");
  Vec c = spec.center();
  FrameField f = spec.chart->frame(spec.center_a1);
  Quadrature1D qr = gauss_legendre(order);
  const int n_ang = std::max(8, 2 * order);
  for (int i = 0; i < order; ++i) {
    double r = 0.5 * spec.eps * (qr.nodes[i] + 1.0);
    double wr = 0.5 * spec.eps * qr.weights[i] * M.geodesic_polar_jacobian(r);
    for (int j = 0; j < n_ang; ++j) {
      double th = 2.0 * M_PI * (j + 0.5) / n_ang;
      Vec u = std::cos(th) * f.tangent[0] + std::sin(th) * f.tangent[1];
      out.emplace_back(M.geodesic(c, u, r), wr * 2.0 * M_PI / n_ang);
    }
  }
  return out;
}

std::vector<std::pair<Vec, double>> beta_ball_nodes(const TubeSegmentSpec& spec, int order) {
  const int k = spec.manifold->codim();
  std::vector<std::pair<Vec, double>> out;
  if (k == 1) {
    Quadrature1D q = gauss_legendre(order);
    for (int i = 0; i < order; ++i)
      out.emplace_back(Vec::Constant(1, spec.sigma * q.nodes[i]), spec.sigma * q.weights[i]);
    return out;
  }
  if (k != 2) throw UnsupportedError("quadrature_measure: implemented for k <= 2");
  Quadrature1D qr = gauss_legendre(order);
  const int n_ang = std::max(8, 2 * order);
  for (int i = 0; i < order; ++i) {
    double rho = 0.5 * spec.sigma * (qr.nodes[i] + 1.0);
    double wr = 0.5 * spec.sigma * qr.weights[i] * rho;
    for (int j = 0; j < n_ang; ++j) {
      double ph = 2.0 * M_PI * (j + 0.5) / n_ang;
      Vec b(2);
      b << rho * std::cos(ph), rho * std::sin(ph);
      out.emplace_back(b, wr * 2.0 * M_PI / n_ang);
    }
  }
  return out;
}

}  // namespace

QuadratureMeasure quadrature_measure(const TubeSegmentSpec& spec, int order) {
  if (order < 4) throw ContractError("quadrature_measure: order must be >= 4");
  spec.validate();
  const Manifold& M = *spec.manifold;
  auto alpha_nodes = alpha_ball_nodes(spec, order);
  auto beta_nodes = beta_ball_nodes(spec, order);

  const std::int64_t n = static_cast<std::int64_t>(alpha_nodes.size()) *
                         static_cast<std::int64_t>(beta_nodes.size());
  QuadratureMeasure qm;
  qm.points.resize(n);
  qm.weights.resize(n);
  qm.feet.resize(n);
  qm.betas.resize(n);
  par::for_each(n, [&](std::int64_t idx) {
    const auto& [foot, wa] = alpha_nodes[idx / beta_nodes.size()];
    const auto& [beta, wb] = beta_nodes[idx % beta_nodes.size()];
    std::vector<Vec> ns = M.normal_frame(foot);
    Vec z = foot;
    for (int j = 0; j < M.codim(); ++j) z += beta(j) * ns[j];
    qm.points[idx] = std::move(z);
    qm.weights[idx] = wa * wb * M.tube_volume_weight(foot, beta);
    qm.feet[idx] = foot;
    qm.betas[idx] = beta;
  });
  KahanSum mass;
  for (double w : qm.weights) mass.add(w);
  qm.total_mass = mass.value();
  for (double& w : qm.weights) w /= qm.total_mass;
  return qm;
}

bool tube_contains(const TubeSegmentSpec& spec, const Vec& z) {
  try {
    ProjectionResult pr = spec.manifold->project(z);
    if (pr.offset.norm() > spec.sigma) return false;
    return spec.manifold->geodesic_distance(pr.foot, spec.center()) < spec.eps;
  } catch (const OutOfReachError&) {
    return false;
  } catch (const OutOfDomainError&) {
    return false;
  }
}

namespace {

Vec sample_in_tube(const TubeSegmentSpec& spec, RngStream& rng, std::int64_t& proposals,
                   std::int64_t& accepted) {
  const Vec c = spec.center();
  const double half = 1.1 * (spec.sigma + spec.eps);
  const int dim = spec.manifold->ambient_dim();
  for (;;) {
    Vec z(dim);
    for (int j = 0; j < dim; ++j) z(j) = c(j) + rng.uniform(-half, half);
    ++proposals;
    if (tube_contains(spec, z)) {
      ++accepted;
      return z;
    }
    if (proposals >= 1000000 && accepted < proposals / 10000)
      throw MisconfigurationError("sample_tube: acceptance rate collapsed below 1e-4");
  }
}

}  // namespace

DiscreteMeasure sample_tube(const TubeSegmentSpec& spec, int n, RngStream& rng) {
  if (n < 1) throw ContractError("sample_tube: n must be >= 1");
  spec.validate();
  DiscreteMeasure m;
  m.points.reserve(n);
  m.weights.assign(n, 1.0 / n);
  std::int64_t proposals = 0, accepted = 0;
  for (int i = 0; i < n; ++i) m.points.push_back(sample_in_tube(spec, rng, proposals, accepted));
  return m;
}

DiscreteMeasure poisson_tube(const TubeSegmentSpec& spec, double intensity, RngStream& rng,
                             const double* volume_hint) {
  if (!(intensity > 0.0)) throw ContractError("poisson_tube: intensity must be positive");
  spec.validate();
  double vol = volume_hint ? *volume_hint : quadrature_measure(spec, 8).total_mass;
  std::int64_t n = rng.poisson(intensity * vol);
  if (n == 0) throw EmptyCloudError("poisson_tube: empty cloud");
  return sample_tube(spec, static_cast<int>(n), rng);
}

double fermi_density_expansion(const FermiChart& chart, const FermiPoint& p) {
  const int m = chart.manifold().dim();
  const int k = chart.manifold().codim();
  const double h = 1e-5;
  const Vec zero_a = Vec::Zero(m);
  const Vec zero_b = Vec::Zero(k);
  Vec h0 = chart.leaf_H(zero_a, zero_b);

  // first derivatives of H^i o phi at the origin
  Eigen::MatrixXd da(m, k);
  da.row(0) = chart.dH_dalpha1(h).transpose();
  for (int j = 1; j < m; ++j) {
    Vec ap = zero_a, am = zero_a;
    ap(j) = h;
    am(j) = -h;
    da.row(j) = ((chart.leaf_H(ap, zero_b) - chart.leaf_H(am, zero_b)) / (2.0 * h)).transpose();
  }
  Eigen::MatrixXd db(k, k);
  for (int j = 0; j < k; ++j) {
    Vec bp = zero_b, bm = zero_b;
    bp(j) = h;
    bm(j) = -h;
    db.row(j) = ((chart.leaf_H(zero_a, bp) - chart.leaf_H(zero_a, bm)) / (2.0 * h)).transpose();
  }

  double val = 1.0;
  val -= p.beta.dot(h0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) val -= p.alpha(j) * p.beta(i) * da(j, i);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) val -= 0.5 * p.beta(i) * p.beta(j) * db(j, i);
  val += 0.5 * sqr(p.beta.dot(h0));
  if (m > 1) {
    Eigen::MatrixXd g2 = chart.metric_trace_hessian();
    for (int q = 1; q < m; ++q)
      for (int l = 1; l < m; ++l) val += 0.25 * p.alpha(q) * p.alpha(l) * g2(q - 1, l - 1);
  }
  return val;
}

}  // namespace tubecurv
