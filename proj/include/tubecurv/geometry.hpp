#pragma once

#include "tubecurv/common.hpp"

#include <memory>
#include <vector>

namespace tubecurv {

class FermiChart;

// Orthonormal frame at a point: m tangent vectors followed by k normals.
struct FrameField {
  Vec base;
  std::vector<Vec> tangent;
  std::vector<Vec> normal;
};

struct ProjectionResult {
  Vec foot;    // nearest point on M
  Vec offset;  // coefficients of z - foot in the canonical normal frame at foot
};

// An embedded submanifold with exact geodesics, frames, projection and
// curvature tensors. Catalogue entries supply closed forms; GraphSurface is
// the single numerically-integrated entry.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;    // m
  virtual int codim() const = 0;  // k
  int ambient_dim() const { return dim() + codim(); }

  virtual double reach_bound() const = 0;        // sigma0, conservative
  virtual double injectivity_bound() const = 0;  // cap on geodesic |t| and eps

  virtual Vec embed(const Vec& intrinsic) const = 0;
  virtual Vec geodesic(const Vec& x, const Vec& v, double t) const = 0;
  virtual double geodesic_distance(const Vec& x, const Vec& y) const;
  virtual bool has_geodesic_distance() const { return true; }
  virtual ProjectionResult project(const Vec& z) const = 0;

  virtual std::vector<Vec> tangent_frame(const Vec& x) const = 0;
  virtual std::vector<Vec> normal_frame(const Vec& x) const = 0;

  virtual Vec second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const = 0;
  // Unnormalized trace of II (no 1/m factor).
  Vec mean_curvature(const Vec& x) const;
  Vec mean_curvature_in_frame(const Vec& x, const std::vector<Vec>& frame) const;

  // Density of the ambient volume against vol_M (x) Lebesgue(beta); beta are
  // coefficients in the canonical normal frame at x.
  virtual double tube_volume_weight(const Vec& x, const Vec& beta) const = 0;
  // H^j of the leaf at normal offset beta, paired with the canonical normal
  // frame at x.
  virtual Vec leaf_mean_curvature(const Vec& x, const Vec& beta) const = 0;

  // Radial Jacobian of geodesic polar coordinates (m = 2 entries only).
  virtual double geodesic_polar_jacobian(double r) const;

  virtual std::unique_ptr<FermiChart> geodesic_chart(const Vec& x0, const Vec& v) const = 0;

  void check_on_manifold(const Vec& x, double tol = 1e-9) const;
  void check_unit_tangent(const Vec& x, const Vec& v, double tol = 1e-9) const;
  void check_tangent(const Vec& x, const Vec& w, double tol = 1e-9) const;
  void check_in_reach(const Vec& beta) const;
};

// ---------------------------------------------------------------------------
// catalogue

std::unique_ptr<Manifold> make_circle(double R);
std::unique_ptr<Manifold> make_planar_line(double window = 10.0);
// y = c x^2 / 2, arc-length window |s| <= window
std::unique_ptr<Manifold> make_parabola(double c = 1.0, double window = 2.0);
// (a cos t, b sin t); s = 0 at parameter t0
std::unique_ptr<Manifold> make_ellipse(double a, double b, double t0 = 0.0, double window = 2.0);
// (a cos(s/c), a sin(s/c), b s / c), c = sqrt(a^2 + b^2)
std::unique_ptr<Manifold> make_helix(double a, double b, double window = 4.0);
std::unique_ptr<Manifold> make_sphere(int m, double R);
std::unique_ptr<Manifold> make_flat_torus(double R1, double R2);
// f(x, y) = (fxx x^2 + fyy y^2) / 2 + fxy x y on |x|,|y| <= window
std::unique_ptr<Manifold> make_graph_surface(double fxx, double fyy, double fxy,
                                             double window = 2.0);

// m = 1 catalogue entries share the arc-length machinery.
class Curve : public Manifold {
 public:
  int dim() const override { return 1; }

  virtual Vec gamma(double s) const = 0;
  virtual Vec dgamma(double s) const = 0;
  virtual Vec ddgamma(double s) const = 0;
  virtual std::vector<Vec> normal_frame_s(double s) const = 0;
  virtual double arc_min() const = 0;
  virtual double arc_max() const = 0;
  // Arc-length position of an ambient point on (or near) the curve.
  virtual double nearest_arc(const Vec& z) const = 0;

  // Signed curvatures k_j(s) = <n_j(s), gamma''(s)> in the canonical frame.
  Vec signed_curvatures(double s) const;

  // Rotation-free normal frame along a |-> gamma(s0 + dir a); the canonical
  // frame already qualifies except for torsion (the helix overrides).
  virtual std::vector<Vec> chart_normal_frame(double s0, int dir, double a) const;

  Vec embed(const Vec& intrinsic) const override;
  Vec geodesic(const Vec& x, const Vec& v, double t) const override;
  double geodesic_distance(const Vec& x, const Vec& y) const override;
  ProjectionResult project(const Vec& z) const override;
  std::vector<Vec> tangent_frame(const Vec& x) const override;
  std::vector<Vec> normal_frame(const Vec& x) const override;
  Vec second_fundamental_form(const Vec& x, const Vec& w1, const Vec& w2) const override;
  double tube_volume_weight(const Vec& x, const Vec& beta) const override;
  Vec leaf_mean_curvature(const Vec& x, const Vec& beta) const override;
  std::unique_ptr<FermiChart> geodesic_chart(const Vec& x0, const Vec& v) const override;
};

}  // namespace tubecurv
