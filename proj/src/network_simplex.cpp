#include "tubecurv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tubecurv {

namespace {

// Dense transportation network simplex. Nodes 0..ns-1 are sources,
// ns..ns+nt-1 sinks; only source->sink arcs exist, id = i * nt + j.
// The basis is a spanning tree; potentials and depths are rebuilt per pivot
// (O(N)), which is fine at the instance sizes the experiments use.
class TransportSimplex {
 public:
  TransportSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                   const CostFn& cost, double cost_scale)
      : a_(supply), b_(demand), cost_(cost), ns_(static_cast<int>(supply.size())),
        nt_(static_cast<int>(demand.size())), n_(ns_ + nt_),
        pivot_tol_(1e-12 * std::max(1.0, cost_scale)) {
    parent_.assign(n_, -1);
    parent_arc_.assign(n_, -1);
    flow_up_.assign(n_, 0.0);
    depth_.assign(n_, 0);
    pot_.assign(n_, 0.0);
    adj_.assign(n_, {});
  }

  TransportPlan solve() {
    northwest_init();
    rebuild_tree();
    const long arcs = static_cast<long>(ns_) * nt_;
    const long block = std::max<long>(64, static_cast<long>(std::sqrt(double(arcs))));
    long ptr = 0;
    long degenerate_run = 0;
    bool bland = false;
    for (long iter = 0;; ++iter) {
      if (iter > 200 * arcs) throw MisconfigurationError("network simplex: pivot limit exceeded");
      long enter = bland ? find_entering_bland() : find_entering_block(ptr, block);
      if (enter < 0) break;
      double theta = pivot(enter);
      degenerate_run = theta <= pivot_tol_ ? degenerate_run + 1 : 0;
      if (degenerate_run > 50L * n_) bland = true;
      rebuild_tree();
    }
    return extract_plan();
  }

 private:
  int src_of(long arc) const { return static_cast<int>(arc / nt_); }
  int dst_node(long arc) const { return ns_ + static_cast<int>(arc % nt_); }
  double arc_cost(long arc) const { return cost_(src_of(arc), static_cast<int>(arc % nt_)); }
  double reduced(long arc) const {
    return arc_cost(arc) - pot_[src_of(arc)] - pot_[dst_node(arc)];
  }

  void northwest_init() {
    // sources/demands are pre-ordered by the caller; the northwest-corner
    // basis is then a near-monotone matching for quasi-1d clouds.
    int i = 0, j = 0;
    double ra = a_[0], rb = b_[0];
    auto add_arc = [&](int si, int tj, double f) {
      long arc = static_cast<long>(si) * nt_ + tj;
      basis_.push_back({arc, f});
      adj_[si].push_back(static_cast<int>(basis_.size()) - 1);
      adj_[ns_ + tj].push_back(static_cast<int>(basis_.size()) - 1);
    };
    for (;;) {
      double f = std::min(ra, rb);
      add_arc(i, j, f);
      if (i == ns_ - 1 && j == nt_ - 1) break;
      if (ra <= rb && i < ns_ - 1) {
        rb -= ra;
        ++i;
        ra = a_[i];
      } else if (j < nt_ - 1) {
        ra -= rb;
        ++j;
        rb = b_[j];
      } else {
        rb -= ra;
        ++i;
        ra = a_[i];
      }
    }
  }

  void rebuild_tree() {
    std::fill(parent_.begin(), parent_.end(), -1);
    std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
    std::vector<int> stack{0};
    std::vector<bool> seen(n_, false);
    seen[0] = true;
    depth_[0] = 0;
    pot_[0] = 0.0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int bi : adj_[u]) {
        long arc = basis_[bi].first;
        int s = src_of(arc), t = dst_node(arc);
        int other = (u == s) ? t : s;
        if (seen[other]) continue;
        seen[other] = true;
        parent_[other] = u;
        parent_arc_[other] = bi;
        depth_[other] = depth_[u] + 1;
        flow_up_[other] = basis_[bi].second;
        // basic arcs satisfy pot[s] + pot[t] = cost
        pot_[other] = arc_cost(arc) - pot_[u];
        stack.push_back(other);
      }
    }
  }

  long find_entering_block(long& ptr, long block) {
    const long arcs = static_cast<long>(ns_) * nt_;
    long best = -1;
    double best_r = -pivot_tol_;
    long scanned = 0;
    while (scanned < arcs) {
      long hi = std::min(ptr + block, arcs);
      for (long arc = ptr; arc < hi; ++arc) {
        double r = reduced(arc);
        if (r < best_r) {
          best_r = r;
          best = arc;
        }
      }
      scanned += hi - ptr;
      ptr = hi == arcs ? 0 : hi;
      if (best >= 0) return best;
    }
    return -1;
  }

  long find_entering_bland() {
    const long arcs = static_cast<long>(ns_) * nt_;
    for (long arc = 0; arc < arcs; ++arc)
      if (reduced(arc) < -pivot_tol_) return arc;
    return -1;
  }

  // Push flow around the cycle closed by `enter`; returns the flow change.
  double pivot(long enter) {
    int u = src_of(enter), w = dst_node(enter);
    // climb to the least common ancestor, collecting both segments
    seg_u_.clear();
    seg_w_.clear();
    int x = u, y = w;
    while (depth_[x] > depth_[y]) {
      seg_u_.push_back(x);
      x = parent_[x];
    }
    while (depth_[y] > depth_[x]) {
      seg_w_.push_back(y);
      y = parent_[y];
    }
    while (x != y) {
      seg_u_.push_back(x);
      seg_w_.push_back(y);
      x = parent_[x];
      y = parent_[y];
    }
    // cycle orientation: u -> w along the entering arc, then w up to the lca,
    // then lca down to u. A tree arc gains flow when its source->sink
    // direction agrees with the traversal.
    double theta = std::numeric_limits<double>::max();
    int leave_bi = -1;
    auto scan = [&](const std::vector<int>& seg, bool climb_along_cycle) {
      for (int node : seg) {
        int bi = parent_arc_[node];
        long arc = basis_[bi].first;
        bool arc_up = dst_node(arc) == parent_[node] || src_of(arc) == parent_[node]
                          ? (src_of(arc) == node)
                          : false;
        // traversal direction on this arc: child -> parent when climbing
        bool along = climb_along_cycle ? arc_up : !arc_up;
        if (!along) {
          double f = basis_[bi].second;
          if (f < theta - 1e-18 || (f <= theta && leave_bi < 0)) {
            theta = f;
            leave_bi = bi;
          }
        }
      }
    };
    scan(seg_w_, true);    // w-side is climbed along the cycle direction
    scan(seg_u_, false);   // u-side is climbed against it
    if (leave_bi < 0) {
      // all cycle arcs gain flow; bounded problem cannot reach this
      throw MisconfigurationError("network simplex: unbounded pivot");
    }
    theta = std::max(theta, 0.0);
    // apply the flow change
    auto apply = [&](const std::vector<int>& seg, bool climb_along_cycle) {
      for (int node : seg) {
        int bi = parent_arc_[node];
        long arc = basis_[bi].first;
        bool arc_up = src_of(arc) == node;
        bool along = climb_along_cycle ? arc_up : !arc_up;
        basis_[bi].second += along ? theta : -theta;
      }
    };
    apply(seg_w_, true);
    apply(seg_u_, false);
    // swap leaving arc for the entering one
    long leave_arc = basis_[leave_bi].first;
    detach(src_of(leave_arc), leave_bi);
    detach(dst_node(leave_arc), leave_bi);
    basis_[leave_bi] = {enter, theta};
    adj_[u].push_back(leave_bi);
    adj_[w].push_back(leave_bi);
    return theta;
  }

  void detach(int node, int bi) {
    auto& v = adj_[node];
    v.erase(std::find(v.begin(), v.end(), bi));
  }

  TransportPlan extract_plan() {
    TransportPlan plan;
    KahanSum total;
    for (auto& [arc, f] : basis_) {
      if (f <= 0.0) continue;
      int i = src_of(arc), j = static_cast<int>(arc % nt_);
      plan.flows.push_back({i, j, f});
      total.add(f * cost_(i, j));
    }
    plan.cost = total.value();
    // dual feasibility residual over all arcs
    double res = 0.0;
    const long arcs = static_cast<long>(ns_) * nt_;
    for (long arc = 0; arc < arcs; ++arc) res = std::max(res, -reduced(arc));
    plan.dual_residual = res;
    return plan;
  }

  std::vector<double> a_, b_;
  const CostFn& cost_;
  int ns_, nt_, n_;
  double pivot_tol_;
  std::vector<std::pair<long, double>> basis_;  // (arc id, flow)
  std::vector<std::vector<int>> adj_;           // node -> basis indices
  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> flow_up_, pot_;
  std::vector<int> seg_u_, seg_w_;
};

}  // namespace

TransportPlan solve_transportation(const std::vector<double>& supply,
                                   const std::vector<double>& demand, const CostFn& cost,
                                   double cost_scale) {
  if (supply.empty() || demand.empty())
    throw ContractError("solve_transportation: empty marginals");
  TransportSimplex solver(supply, demand, cost, cost_scale);
  return solver.solve();
}

}  // namespace tubecurv
