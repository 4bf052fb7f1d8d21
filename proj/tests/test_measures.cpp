#include "tubecurv/measures.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace tubecurv;

namespace {

struct Setup {
  std::unique_ptr<Manifold> M;
  std::unique_ptr<FermiChart> chart;
  TubeSegmentSpec spec;
};

Setup circle_setup(double R, double sigma, double eps) {
  Setup s;
  s.M = make_circle(R);
  Vec x0 = s.M->embed(Vec::Zero(1));
  s.chart = s.M->geodesic_chart(x0, s.M->tangent_frame(x0)[0]);
  s.spec = {s.M.get(), s.chart.get(), 0.0, sigma, eps};
  return s;
}

Setup sphere_setup(double R, double sigma, double eps) {
  Setup s;
  s.M = make_sphere(2, R);
  Vec x0 = s.M->embed(Vec::Zero(2));
  s.chart = s.M->geodesic_chart(x0, s.M->tangent_frame(x0)[0]);
  s.spec = {s.M.get(), s.chart.get(), 0.0, sigma, eps};
  return s;
}

// 1d Simpson integration oracle for circle-tube moments of (alpha, beta)
double circle_moment_oracle(double R, double sigma, double eps, int pa, int pb) {
  auto simpson = [](auto f, double lo, double hi, int n) {
    double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  // density (1 + beta/R) with the outward-normal sign convention
  double num = simpson([&](double a) { return std::pow(a, pa); }, -eps, eps, 2000) *
               simpson([&](double b) { return std::pow(b, pb) * (1.0 + b / R); }, -sigma, sigma,
                       2000);
  double den = 2.0 * eps * 2.0 * sigma;
  return num / den;
}

}  // namespace

TEST_CASE("quadrature moments match the analytic density oracle") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  QuadratureMeasure q = quadrature_measure(s.spec, 8);
  double m_b = 0.0, m_b2 = 0.0, m_a = 0.0, m_a2 = 0.0;
  for (size_t i = 0; i < q.points.size(); ++i) {
    FermiPoint p = s.chart->invert(q.points[i]);
    m_b += q.weights[i] * p.beta(0);
    m_b2 += q.weights[i] * p.beta(0) * p.beta(0);
    m_a += q.weights[i] * p.alpha(0);
    m_a2 += q.weights[i] * p.alpha(0) * p.alpha(0);
  }
  CHECK(m_b == doctest::Approx(circle_moment_oracle(1, 0.1, 0.1, 0, 1)).epsilon(1e-6));
  CHECK(m_b2 == doctest::Approx(circle_moment_oracle(1, 0.1, 0.1, 0, 2)).epsilon(1e-6));
  CHECK(std::fabs(m_b2 - 0.1 * 0.1 / 3.0) < 1e-9);  // sigma^2/(k+2), exact for the circle
  CHECK(std::fabs(m_a) < 1e-12);
  CHECK(std::fabs(m_a2 - 0.1 * 0.1 / 3.0) < 1e-9);  // eps^2/(m+2)

  // torus: both flat second moments are exact
  auto torus = make_flat_torus(1.0, 2.0);
  Vec x0 = torus->embed(Vec::Zero(2));
  auto chart = torus->geodesic_chart(x0, torus->tangent_frame(x0)[0]);
  TubeSegmentSpec spec{torus.get(), chart.get(), 0.0, 0.08, 0.12};
  QuadratureMeasure qt = quadrature_measure(spec, 10);
  double t_a2 = 0.0, t_b2 = 0.0, mass_check = 0.0;
  for (size_t i = 0; i < qt.points.size(); ++i) {
    FermiPoint p = chart->invert(qt.points[i]);
    t_a2 += qt.weights[i] * p.alpha(0) * p.alpha(0);
    t_b2 += qt.weights[i] * p.beta(0) * p.beta(0);
    mass_check += qt.weights[i];
  }
  CHECK(std::fabs(mass_check - 1.0) < 1e-12);
  CHECK(std::fabs(t_a2 - 0.12 * 0.12 / 4.0) < 1e-8);
  CHECK(std::fabs(t_b2 - 0.08 * 0.08 / 4.0) < 1e-8);
}

TEST_CASE("degenerate tube: weights collapse to the geodesic-ball rule") {
  auto s = circle_setup(1.0, 1e-9, 0.1);
  QuadratureMeasure q = quadrature_measure(s.spec, 8);
  // group by alpha node: each group's total weight must match the plain
  // Gauss-Legendre weight of the uniform arc rule
  Quadrature1D gl = gauss_legendre(8);
  for (int ia = 0; ia < 8; ++ia) {
    double group = 0.0;
    for (int ib = 0; ib < 8; ++ib) group += q.weights[ia * 8 + ib];
    CHECK(group == doctest::Approx(gl.weights[ia] / 2.0).epsilon(1e-8));
  }
  for (const Vec& b : q.betas) CHECK(std::fabs(b(0)) < 1e-9);
}

TEST_CASE("sphere tube mass equals the spherical shell segment volume") {
  double sigma = 0.1, eps = 0.1;
  auto s = sphere_setup(1.0, sigma, eps);
  QuadratureMeasure q = quadrature_measure(s.spec, 12);
  // cap area x radial integral of (1+b)^2
  double cap = 2.0 * M_PI * (1.0 - std::cos(eps));
  double radial = 2.0 * sigma + 2.0 * std::pow(sigma, 3) / 3.0;
  CHECK(q.total_mass == doctest::Approx(cap * radial).epsilon(1e-6));
}

TEST_CASE("sample_tube: membership and the signed-offset mean") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  RngStream rng(101, stream_tag({1}));
  DiscreteMeasure one = sample_tube(s.spec, 1, rng);
  one.check_invariants(&s.spec);

  const int n = 100000;
  DiscreteMeasure m = sample_tube(s.spec, n, rng);
  m.check_invariants(&s.spec);
  // mean of the offset toward the center is -sigma^2/(3R)
  double mean_toward = 0.0, mean_sq = 0.0;
  for (const Vec& z : m.points) {
    double toward = -(z.norm() - 1.0);
    mean_toward += toward / n;
    mean_sq += toward * toward / n;
  }
  double se = std::sqrt((mean_sq - mean_toward * mean_toward) / n);
  CHECK(std::fabs(mean_toward - (-0.1 * 0.1 / 3.0)) < 3.0 * se);
}

TEST_CASE("sample_tube alpha moment on the sphere against quadrature") {
  auto s = sphere_setup(1.0, 0.1, 0.1);
  QuadratureMeasure q = quadrature_measure(s.spec, 12);
  double quad_a2 = 0.0;
  for (size_t i = 0; i < q.points.size(); ++i) {
    FermiPoint p = s.chart->invert(q.points[i]);
    quad_a2 += q.weights[i] * p.alpha(0) * p.alpha(0);
  }
  RngStream rng(102, stream_tag({2}));
  const int n = 100000;
  DiscreteMeasure m = sample_tube(s.spec, n, rng);
  double mc = 0.0, mc2 = 0.0;
  for (const Vec& z : m.points) {
    FermiPoint p = s.chart->invert(z);
    double v = p.alpha(0) * p.alpha(0);
    mc += v / n;
    mc2 += v * v / n;
  }
  double se = std::sqrt((mc2 - mc * mc) / n);
  CHECK(std::fabs(mc - quad_a2) < 3.0 * se);
  CHECK(quad_a2 == doctest::Approx(0.1 * 0.1 / 4.0).epsilon(0.02));
}

TEST_CASE("quadrature and Monte Carlo agree on random cubics") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  QuadratureMeasure q = quadrature_measure(s.spec, 12);
  RngStream rng(103, stream_tag({3}));
  const int n = 1000000;
  DiscreteMeasure m = sample_tube(s.spec, n, rng);
  RngStream coeff_rng(104, stream_tag({4}));
  for (int probe = 0; probe < 10; ++probe) {
    double c[10];
    for (double& x : c) x = coeff_rng.uniform(-1.0, 1.0);
    auto f = [&](const Vec& z) {
      double x = z(0), y = z(1);
      return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y +
             c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    };
    double quad = 0.0;
    for (size_t i = 0; i < q.points.size(); ++i) quad += q.weights[i] * f(q.points[i]);
    double mc = 0.0, mc2 = 0.0;
    for (const Vec& z : m.points) {
      double v = f(z);
      mc += v / n;
      mc2 += v * v / n;
    }
    double se = std::sqrt(std::max(mc2 - mc * mc, 0.0) / n);
    CHECK(std::fabs(mc - quad) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("odd alpha moments vanish where a reflection symmetry fixes x0") {
  for (int which = 0; which < 2; ++which) {
    Setup s = which == 0 ? circle_setup(1.0, 0.08, 0.1) : sphere_setup(1.0, 0.08, 0.1);
    QuadratureMeasure q = quadrature_measure(s.spec, 10);
    double m1 = 0.0, m3 = 0.0;
    for (size_t i = 0; i < q.points.size(); ++i) {
      FermiPoint p = s.chart->invert(q.points[i]);
      m1 += q.weights[i] * p.alpha(0);
      m3 += q.weights[i] * std::pow(p.alpha(0), 3);
    }
    CHECK(std::fabs(m1) < 1e-10);
    CHECK(std::fabs(m3) < 1e-10);
  }
}

TEST_CASE("poisson_tube: counts, independence, empty-cloud error") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  {
    RngStream rng(105, stream_tag({5}));
    CHECK_THROWS_AS(poisson_tube(s.spec, 1e-9, rng), EmptyCloudError);
  }
  // E[N] = n vol = 0.04 n for the circle tube (odd-term cancellation)
  const double intensity = 1000.0;
  const int draws = 200;
  double sum_n = 0.0;
  for (int d = 0; d < draws; ++d) {
    RngStream rng(106, stream_tag({6, static_cast<std::uint64_t>(d)}));
    sum_n += static_cast<double>(poisson_tube(s.spec, intensity, rng).points.size());
  }
  double lam = 0.04 * intensity;
  double se = std::sqrt(lam / draws);
  CHECK(std::fabs(sum_n / draws - lam) < 3.0 * se);

  // counts on two disjoint segments are independent
  TubeSegmentSpec far = s.spec;
  far.center_a1 = 1.5;
  std::vector<double> n1, n2;
  for (int d = 0; d < 500; ++d) {
    RngStream ra(117, stream_tag({7, static_cast<std::uint64_t>(d), 0}));
    RngStream rb(117, stream_tag({7, static_cast<std::uint64_t>(d), 1}));
    n1.push_back(static_cast<double>(poisson_tube(s.spec, 500.0, ra).points.size()));
    n2.push_back(static_cast<double>(poisson_tube(far, 500.0, rb).points.size()));
  }
  double mu1 = 0, mu2 = 0;
  for (int d = 0; d < 500; ++d) {
    mu1 += n1[d] / 500;
    mu2 += n2[d] / 500;
  }
  double cov = 0, v1 = 0, v2 = 0;
  for (int d = 0; d < 500; ++d) {
    cov += (n1[d] - mu1) * (n2[d] - mu2) / 500;
    v1 += (n1[d] - mu1) * (n1[d] - mu1) / 500;
    v2 += (n2[d] - mu2) * (n2[d] - mu2) / 500;
  }
  CHECK(std::fabs(cov / std::sqrt(v1 * v2)) < 0.1);
}

TEST_CASE("fermi density expansion") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  FermiPoint origin{Vec::Zero(1), Vec::Zero(1)};
  CHECK(fermi_density_expansion(*s.chart, origin) == doctest::Approx(1.0).epsilon(1e-12));

  // circle: the bracket terminates at first order and is exact
  RngStream rng(108, stream_tag({8}));
  for (int probe = 0; probe < 20; ++probe) {
    FermiPoint p{Vec::Constant(1, rng.uniform(-0.1, 0.1)),
                 Vec::Constant(1, rng.uniform(-0.1, 0.1))};
    double exact = s.M->tube_volume_weight(s.chart->surface_point(p.alpha), p.beta);
    CHECK(fermi_density_expansion(*s.chart, p) == doctest::Approx(exact).epsilon(1e-9));
  }

  // sphere: matches the exact density up to a stable O(delta^3) remainder
  auto sp = sphere_setup(1.0, 0.1, 0.1);
  std::vector<double> scales, errs;
  for (double scale : {0.2, 0.1, 0.05, 0.025}) {
    double worst = 0.0;
    RngStream prng(109, stream_tag({9, static_cast<std::uint64_t>(scale * 1e4)}));
    for (int probe = 0; probe < 200; ++probe) {
      FermiPoint p{(Vec(2) << prng.uniform(-scale, scale), prng.uniform(-scale, scale)).finished(),
                   Vec::Constant(1, prng.uniform(-scale, scale))};
      double exact = sp.M->tube_volume_weight(sp.chart->surface_point(p.alpha), p.beta) *
                     sp.chart->surface_metric_factor(p.alpha);
      worst = std::max(worst, std::fabs(fermi_density_expansion(*sp.chart, p) - exact));
    }
    scales.push_back(scale);
    errs.push_back(worst);
  }
  double slope = loglog_slope(scales, errs);
  CHECK(slope > 2.6);
}

TEST_CASE("discrete measure text round trip is bit exact") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  RngStream rng(110, stream_tag({10}));
  DiscreteMeasure m = sample_tube(s.spec, 37, rng);
  DiscreteMeasure back = DiscreteMeasure::from_text(m.to_text());
  REQUIRE(back.points.size() == m.points.size());
  for (size_t i = 0; i < m.points.size(); ++i) {
    CHECK((back.points[i] - m.points[i]).norm() == 0.0);
    CHECK(back.weights[i] == m.weights[i]);
  }
  CHECK(back.to_text() == m.to_text());
}

TEST_CASE("tube spec validation errors") {
  auto s = circle_setup(1.0, 0.1, 0.1);
  TubeSegmentSpec bad = s.spec;
  bad.sigma = 1.5;  // beyond the reach bound
  CHECK_THROWS_AS(quadrature_measure(bad, 8), OutOfReachError);
  CHECK_THROWS_AS(quadrature_measure(s.spec, 3), ContractError);
}
