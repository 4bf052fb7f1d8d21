#include "tubecurv/parallel.hpp"

#include <doctest.h>

#include <cmath>

using namespace tubecurv;

TEST_CASE("parallel and serial reductions agree bitwise") {
  auto term = [](std::int64_t i) { return std::sin(0.001 * static_cast<double>(i)) / (i + 1.0); };
  for (std::int64_t n : {1, 7, 63, 64, 65, 100000}) {
    double serial = par::sum_serial(n, term);
    double parallel = par::sum_indexed(n, term, true);
    CHECK(serial == parallel);
  }
}

TEST_CASE("for_each covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  par::for_each(1000, [&](std::int64_t i) { hits[i] += 1; }, true);
  for (int h : hits) CHECK(h == 1);
}
