#pragma once

#include "tubecurv/transport.hpp"

namespace tubecurv::oracle {

// Exhaustive permutation minimum over equal-count uniform clouds (n <= 9).
double brute_force_w1(const std::vector<Vec>& p, const std::vector<Vec>& q);

// Finite-difference ratio of leaf volume elements at intrinsic coordinates u:
// sqrt(det Gram(d psi_beta)) / sqrt(det Gram(d psi_0)).
double fd_leaf_volume_ratio(const Manifold& M, const Vec& intrinsic, const Vec& beta);

// Frozen transportation instances solved with an external LP solver.
struct TransportCase {
  int ns, nt, d;
  std::vector<double> P, Q, a, b;
  double cost;
};
const std::vector<TransportCase>& lp_reference_cases();

// Independent graph-surface geodesic: RK4 with analytic Christoffel symbols
// Gamma^k_ij = f_k f_ij / (1 + |grad f|^2) and a much finer step.
Vec graph_geodesic_reference(double fxx, double fyy, double fxy, const Vec& start_xy,
                             const Vec& dir_xy, double t, int steps);

double median(std::vector<double> v);

}  // namespace tubecurv::oracle
