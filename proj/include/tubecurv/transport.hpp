#pragma once

#include "tubecurv/measures.hpp"

#include <functional>

namespace tubecurv {

struct TransportPlan {
  struct Flow {
    int i;
    int j;
    double mass;
  };
  std::vector<Flow> flows;
  double cost = 0.0;
  double dual_residual = 0.0;  // max dual-feasibility violation at termination
};

struct W1Result {
  double cost = 0.0;
  TransportPlan plan;
};

// Exact 1-Wasserstein distance, Euclidean ground metric. Equal-size
// equal-weight inputs go through the assignment solver, general inputs
// through the network simplex on the complete bipartite graph.
W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

std::string plan_to_text(const TransportPlan& plan);

using CostFn = std::function<double(int, int)>;

// Dense transportation problem; supplies and demands must balance.
TransportPlan solve_transportation(const std::vector<double>& supply,
                                   const std::vector<double>& demand, const CostFn& cost,
                                   double cost_scale);

// Shortest-augmenting-path assignment solver; returns the optimal total cost.
double solve_assignment(int n, const CostFn& cost, std::vector<int>& col_of_row);

// ---------------------------------------------------------------------------
// the proposed transport map T and the deterministic W1 sandwich

struct TransportMapT {
  const FermiChart* chart = nullptr;
  double delta = 0.0;
  double sigma = 0.0;
  Vec dH;  // d/d alpha_1 (H^i o phi)(0)

  FermiPoint apply_coords(const FermiPoint& p) const;
  Vec apply(const Vec& z) const;
  double coord_jacobian(const FermiPoint& p) const;  // |det D T_coords|
};

TransportMapT make_transport_map(const FermiChart& chart, double delta, double sigma);

// integral of |Tz - z| against the quadrature test measure at the chart base
double upper_bound_via_T(const FermiChart& chart, double delta, double sigma, double eps,
                         int order);

// Kantorovich-Rubinstein bound with the projection test function, divided by
// the measured sup-gradient factor.
double dual_lower_bound(const FermiChart& chart, double delta, double sigma, double eps,
                        int order);

// max |d(T_* mu_x0)/d mu_y - 1| over probe nodes, from exact Jacobians and
// exact tube densities.
double density_ratio_check(const FermiChart& chart, double delta, double sigma, double eps,
                           int n_probe);

}  // namespace tubecurv
