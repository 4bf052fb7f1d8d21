#pragma once

#include "tubecurv/fermi.hpp"
#include "tubecurv/rng.hpp"

#include <string>

namespace tubecurv {

// One tube segment B_{sigma,eps}(x): points within normal distance sigma of M
// whose projection lies within geodesic distance eps of the center.
struct TubeSegmentSpec {
  const Manifold* manifold = nullptr;
  const FermiChart* chart = nullptr;  // base geodesic
  double center_a1 = 0.0;             // center position along the geodesic
  double sigma = 0.0;
  double eps = 0.0;

  Vec center() const { return chart->base_point(center_a1); }
  void validate() const;
};

// Finitely supported probability measure on ambient points.
struct DiscreteMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;

  int ambient_dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
  void check_invariants(const TubeSegmentSpec* spec = nullptr) const;
  std::string to_text() const;
  static DiscreteMeasure from_text(const std::string& text);
};

// Deterministic node/weight representation of mu_x^{sigma,eps} carrying the
// disintegration density. Weights are normalized; total_mass holds the
// unnormalized value, i.e. the Lebesgue volume of the segment.
struct QuadratureMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;
  std::vector<Vec> feet;
  std::vector<Vec> betas;  // canonical normal coefficients at the foot
  double total_mass = 0.0;
};

QuadratureMeasure quadrature_measure(const TubeSegmentSpec& spec, int order);

bool tube_contains(const TubeSegmentSpec& spec, const Vec& z);

// n i.i.d. points, uniform w.r.t. ambient Lebesgue on the segment.
DiscreteMeasure sample_tube(const TubeSegmentSpec& spec, int n, RngStream& rng);

// Poisson(intensity * vol) many uniform points; the empirical measure of a
// Poisson point process restricted to the segment.
DiscreteMeasure poisson_tube(const TubeSegmentSpec& spec, double intensity, RngStream& rng,
                             const double* volume_hint = nullptr);

// Second-order expansion of the test-measure density in Fermi coordinates;
// cross-check against exact densities only.
double fermi_density_expansion(const FermiChart& chart, const FermiPoint& p);

}  // namespace tubecurv
