#include "tubecurv/transport.hpp"

#include <cmath>
#include <limits>

namespace tubecurv {

// Shortest-augmenting-path solver for the square assignment problem
// (Jonker-Volgenant style with dual potentials; costs evaluated on the fly).
double solve_assignment(int n, const CostFn& cost, std::vector<int>& col_of_row) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n, 0.0), v(n, 0.0), shortest(n, inf);
  std::vector<int> row_of_col(n, -1), path(n, -1), remaining(n);
  std::vector<bool> sr(n, false), sc(n, false);
  col_of_row.assign(n, -1);

  for (int cur_row = 0; cur_row < n; ++cur_row) {
    std::fill(sr.begin(), sr.end(), false);
    std::fill(sc.begin(), sc.end(), false);
    std::fill(shortest.begin(), shortest.end(), inf);
    int num_remaining = n;
    for (int jp = 0; jp < n; ++jp) remaining[jp] = jp;

    double min_val = 0.0;
    int i = cur_row;
    int sink = -1;
    while (sink == -1) {
      sr[i] = true;
      int index = -1;
      double lowest = inf;
      for (int it = 0; it < num_remaining; ++it) {
        int j = remaining[it];
        double r = min_val + cost(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = i;
          shortest[j] = r;
        }
        if (shortest[j] < lowest || (shortest[j] == lowest && row_of_col[j] == -1)) {
          lowest = shortest[j];
          index = it;
        }
      }
      min_val = lowest;
      if (!(min_val < inf)) throw MisconfigurationError("assignment: infeasible instance");
      int j = remaining[index];
      if (row_of_col[j] == -1) {
        sink = j;
      } else {
        i = row_of_col[j];
      }
      sc[j] = true;
      remaining[index] = remaining[--num_remaining];
    }

    u[cur_row] += min_val;
    for (int ip = 0; ip < n; ++ip)
      if (sr[ip] && ip != cur_row) u[ip] += min_val - shortest[col_of_row[ip]];
    for (int jp = 0; jp < n; ++jp)
      if (sc[jp]) v[jp] -= min_val - shortest[jp];

    int j = sink;
    for (;;) {
      int ip = path[j];
      row_of_col[j] = ip;
      std::swap(col_of_row[ip], j);
      if (ip == cur_row) break;
    }
  }

  KahanSum total;
  for (int ip = 0; ip < n; ++ip) total.add(cost(ip, col_of_row[ip]));
  return total.value();
}

}  // namespace tubecurv
