#include "tubecurv/geometry.hpp"

#include "oracles.hpp"
#include "tubecurv/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace tubecurv;

namespace {

struct CatalogueEntry {
  std::unique_ptr<Manifold> M;
  std::function<Vec(RngStream&)> random_intrinsic;
};

std::vector<CatalogueEntry> make_catalogue() {
  std::vector<CatalogueEntry> cat;
  auto unif_vec = [](RngStream& r, int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = r.uniform(lo, hi);
    return v;
  };
  cat.push_back({make_circle(1.0), [=](RngStream& r) { return unif_vec(r, 1, -2.0, 2.0); }});
  cat.push_back({make_parabola(1.0, 2.0), [=](RngStream& r) { return unif_vec(r, 1, -1.0, 1.0); }});
  cat.push_back(
      {make_ellipse(2.0, 1.0, 0.4, 2.0), [=](RngStream& r) { return unif_vec(r, 1, -1.0, 1.0); }});
  cat.push_back(
      {make_helix(0.5, 0.5, 4.0), [=](RngStream& r) { return unif_vec(r, 1, -1.5, 1.5); }});
  cat.push_back({make_sphere(2, 1.0), [=](RngStream& r) { return unif_vec(r, 2, -0.8, 0.8); }});
  cat.push_back(
      {make_flat_torus(1.0, 2.0), [=](RngStream& r) { return unif_vec(r, 2, -2.0, 2.0); }});
  cat.push_back(
      {make_graph_surface(1.0, -0.5, 0.3, 2.0), [=](RngStream& r) { return unif_vec(r, 2, -0.8, 0.8); }});
  return cat;
}

Vec random_unit_tangent(const Manifold& M, const Vec& x, RngStream& rng) {
  auto frame = M.tangent_frame(x);
  Vec v = Vec::Zero(M.ambient_dim());
  for (const Vec& e : frame) v += rng.uniform(-1.0, 1.0) * e;
  if (v.norm() < 1e-6) v = frame[0];
  return v / v.norm();
}

std::vector<Vec> random_tangent_frame(const Manifold& M, const Vec& x, RngStream& rng) {
  auto base = M.tangent_frame(x);
  std::vector<Vec> out;
  for (int i = 0; i < M.dim(); ++i) {
    Vec v = Vec::Zero(M.ambient_dim());
    for (const Vec& e : base) v += rng.uniform(-1.0, 1.0) * e;
    for (const Vec& f : out) v -= v.dot(f) * f;
    if (v.norm() < 1e-3) {
      v = base[i];
      for (const Vec& f : out) v -= v.dot(f) * f;
    }
    out.push_back(v / v.norm());
  }
  return out;
}

}  // namespace

TEST_CASE("embed basepoints") {
  auto circle = make_circle(1.0);
  Vec p = circle->embed(Vec::Zero(1));
  CHECK(p(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(0.0).epsilon(1e-15));

  auto sphere = make_sphere(2, 1.0);
  Vec q = sphere->embed(Vec::Zero(2));
  CHECK((q - (Vec(3) << 0, 0, 1).finished()).norm() < 1e-15);

  auto torus = make_flat_torus(1.0, 1.0);
  Vec t = torus->embed(Vec::Zero(2));
  CHECK((t - (Vec(4) << 1, 0, 1, 0).finished()).norm() < 1e-15);

  CHECK_THROWS_AS(sphere->embed((Vec(2) << 4.0, 0.0).finished()), OutOfDomainError);
}

TEST_CASE("geodesic quarter arcs") {
  auto circle = make_circle(1.0);
  Vec x = (Vec(2) << 1, 0).finished();
  Vec v = (Vec(2) << 0, 1).finished();
  Vec g = circle->geodesic(x, v, M_PI_2);
  CHECK((g - (Vec(2) << 0, 1).finished()).norm() < 1e-12);

  auto sphere = make_sphere(2, 1.0);
  Vec xs = (Vec(3) << 0, 0, 1).finished();
  Vec vs = (Vec(3) << 1, 0, 0).finished();
  Vec gs = sphere->geodesic(xs, vs, M_PI_2);
  CHECK((gs - (Vec(3) << 1, 0, 0).finished()).norm() < 1e-12);

  CHECK_THROWS_AS(circle->geodesic(x, (Vec(2) << 0.5, 0.5).finished(), 0.1), ContractError);
}

TEST_CASE("graph-surface geodesic against the analytic-Christoffel reference") {
  auto graph = make_graph_surface(1.0, 0.0, 0.0, 2.0);  // z = x^2 / 2
  Vec origin = graph->embed(Vec::Zero(2));
  Vec e1 = graph->tangent_frame(origin)[0];
  Vec end = graph->geodesic(origin, e1, 0.1);
  Vec ref = oracle::graph_geodesic_reference(1.0, 0.0, 0.0, Vec::Zero(2),
                                             (Vec(2) << e1(0), e1(1)).finished(), 0.1, 20000);
  CHECK((end - ref).norm() < 1e-8);
}

TEST_CASE("projection: radial points and the graph-surface grid oracle") {
  auto circle = make_circle(1.0);
  auto pr = circle->project((Vec(2) << 1.05, 0).finished());
  CHECK((pr.foot - (Vec(2) << 1, 0).finished()).norm() < 1e-14);
  CHECK(pr.offset.norm() == doctest::Approx(0.05).epsilon(1e-12));

  auto sphere = make_sphere(2, 1.0);
  auto ps = sphere->project((Vec(3) << 0, 0, 0.9).finished());
  CHECK((ps.foot - (Vec(3) << 0, 0, 1).finished()).norm() < 1e-14);
  CHECK(ps.offset.norm() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(sphere->project(Vec::Zero(3)), OutOfReachError);

  auto graph = make_graph_surface(1.0, 0.0, 0.0, 2.0);
  Vec z = (Vec(3) << 0.1, 0.0, 0.2).finished();
  auto pg = graph->project(z);
  // dense-grid nearest point with two local refinement rounds
  double best_x = 0, best_d = 1e300;
  double lo = -0.5, hi = 0.7;
  for (int round = 0; round < 3; ++round) {
    for (int i = 0; i <= 4000; ++i) {
      double xx = lo + (hi - lo) * i / 4000;
      Vec p = (Vec(3) << xx, 0.0, 0.5 * xx * xx).finished();
      double d = (z - p).norm();
      if (d < best_d) {
        best_d = d;
        best_x = xx;
      }
    }
    double w = (hi - lo) / 100;
    lo = best_x - w;
    hi = best_x + w;
  }
  CHECK(std::fabs(pg.foot(0) - best_x) < 1e-7);
  CHECK(std::fabs((z - pg.foot).norm() - best_d) < 1e-7);
}

TEST_CASE("second fundamental form on the umbilic sphere, torus and graph") {
  for (double R : {1.0, 2.0}) {
    auto sphere = make_sphere(2, R);
    Vec x = sphere->embed(Vec::Zero(2));
    Vec e = sphere->tangent_frame(x)[0];
    Vec II = sphere->second_fundamental_form(x, e, e);
    CHECK(II.norm() == doctest::Approx(1.0 / R).epsilon(1e-12));
    CHECK(II.dot(x / x.norm()) == doctest::Approx(-1.0 / R).epsilon(1e-12));
  }

  auto torus = make_flat_torus(1.0, 2.0);
  Vec xt = torus->embed(Vec::Zero(2));
  auto et = torus->tangent_frame(xt);
  CHECK(torus->second_fundamental_form(xt, et[0], et[0]).norm() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(torus->second_fundamental_form(xt, et[0], et[1]).norm() < 1e-14);

  auto graph = make_graph_surface(1.0, 0.0, 0.0, 2.0);
  Vec xg = graph->embed(Vec::Zero(2));
  Vec e1 = graph->tangent_frame(xg)[0];
  Vec IIg = graph->second_fundamental_form(xg, e1, e1);
  CHECK((IIg - (Vec(3) << 0, 0, 1).finished()).norm() < 1e-12);
  // finite-difference Hessian of the embedding as an independent check
  double h = 1e-5;
  Vec up = graph->embed((Vec(2) << h, 0).finished());
  Vec um = graph->embed((Vec(2) << -h, 0).finished());
  Vec u0 = graph->embed(Vec::Zero(2));
  Vec fd = (up - 2 * u0 + um) / (h * h);
  CHECK((IIg - fd).norm() < 1e-5);
}

TEST_CASE("mean curvature magnitudes") {
  for (double R : {1.0, 3.0}) {
    auto c = make_circle(R);
    CHECK(c->mean_curvature(c->embed(Vec::Zero(1))).norm() ==
          doctest::Approx(1.0 / R).epsilon(1e-12));
    auto s = make_sphere(2, R);
    CHECK(s->mean_curvature(s->embed(Vec::Zero(2))).norm() ==
          doctest::Approx(2.0 / R).epsilon(1e-12));
  }
  auto torus = make_flat_torus(1.0, 2.0);
  Vec x = torus->embed((Vec(2) << 0.3, -0.7).finished());
  Vec H = torus->mean_curvature(x);
  auto n = torus->normal_frame(x);
  CHECK(H.dot(n[0]) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(H.dot(n[1]) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(H.squaredNorm() == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("tube volume weight closed forms") {
  auto circle = make_circle(2.0);
  Vec x = circle->embed(Vec::Zero(1));
  // offset beta toward the center = -beta on the outward normal
  for (double b : {0.01, 0.3, 0.9}) {
    CHECK(circle->tube_volume_weight(x, Vec::Constant(1, -b)) ==
          doctest::Approx(1.0 - b / 2.0).epsilon(1e-14));
  }
  CHECK(circle->tube_volume_weight(x, Vec::Zero(1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(circle->tube_volume_weight(x, Vec::Constant(1, 2.5)), OutOfReachError);

  auto sphere = make_sphere(2, 1.0);
  Vec xs = sphere->embed(Vec::Zero(2));
  for (double b : {0.05, 0.4}) {
    CHECK(sphere->tube_volume_weight(xs, Vec::Constant(1, -b)) ==
          doctest::Approx((1.0 - b) * (1.0 - b)).epsilon(1e-14));
  }
}

TEST_CASE("jacobian consistency: weight equals fd leaf-volume ratio") {
  RngStream rng(2026, stream_tag({0x77}));
  for (auto& entry : make_catalogue()) {
    const Manifold& M = *entry.M;
    for (int probe = 0; probe < 100; ++probe) {
      Vec u = entry.random_intrinsic(rng);
      Vec beta(M.codim());
      double cap = 0.4 * M.reach_bound();
      for (int j = 0; j < M.codim(); ++j) beta(j) = rng.uniform(-cap, cap) / std::sqrt(1.0 * M.codim());
      Vec x = M.embed(u);
      double w = M.tube_volume_weight(x, beta);
      double fd = oracle::fd_leaf_volume_ratio(M, u, beta);
      CHECK(std::fabs(w - fd) <= 1e-4 * std::fabs(fd));
    }
  }
}

TEST_CASE("II symmetry and normality on random inputs") {
  RngStream rng(2027, stream_tag({0x78}));
  for (auto& entry : make_catalogue()) {
    const Manifold& M = *entry.M;
    for (int probe = 0; probe < 100; ++probe) {
      Vec x = M.embed(entry.random_intrinsic(rng));
      Vec w1 = random_unit_tangent(M, x, rng);
      Vec w2 = random_unit_tangent(M, x, rng);
      Vec a = M.second_fundamental_form(x, w1, w2);
      Vec b = M.second_fundamental_form(x, w2, w1);
      CHECK((a - b).norm() < 1e-9);
      for (const Vec& e : M.tangent_frame(x)) CHECK(std::fabs(a.dot(e)) < 1e-9);
    }
  }
}

TEST_CASE("mean curvature is basis invariant") {
  RngStream rng(2028, stream_tag({0x79}));
  for (auto& entry : make_catalogue()) {
    const Manifold& M = *entry.M;
    for (int probe = 0; probe < 20; ++probe) {
      Vec x = M.embed(entry.random_intrinsic(rng));
      auto f1 = random_tangent_frame(M, x, rng);
      auto f2 = random_tangent_frame(M, x, rng);
      double n1 = M.mean_curvature_in_frame(x, f1).norm();
      double n2 = M.mean_curvature_in_frame(x, f2).norm();
      CHECK(std::fabs(n1 - n2) < 1e-9);
    }
  }
}

TEST_CASE("non-tangent inputs are rejected") {
  auto sphere = make_sphere(2, 1.0);
  Vec x = sphere->embed(Vec::Zero(2));
  Vec bad = (Vec(3) << 0, 0.5, 0.5).finished();
  CHECK_THROWS_AS(sphere->second_fundamental_form(x, bad, bad), ContractError);
}
