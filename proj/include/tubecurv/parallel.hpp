#pragma once

#include "tubecurv/common.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tubecurv::par {

// Global switch; the CLI maps --workers 1 onto the serial path.
inline bool& enabled() {
  static bool on = true;
  return on;
}

// Chunked reduction with a fixed chunk layout independent of the thread
// count: partials are combined in index order, so the serial and OpenMP
// paths return identical bits.
template <class F>
double sum_indexed(std::int64_t n, F&& term, bool parallel) {
  if (n <= 0) return 0.0;
  const int chunks = static_cast<int>(std::min<std::int64_t>(64, n));
  std::vector<double> partial(chunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int c = 0; c < chunks; ++c) {
    const std::int64_t lo = n * c / chunks;
    const std::int64_t hi = n * (c + 1) / chunks;
    KahanSum s;
    for (std::int64_t i = lo; i < hi; ++i) s.add(term(i));
    partial[c] = s.value();
  }
  (void)parallel;
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

template <class F>
double sum_indexed(std::int64_t n, F&& term) {
  return sum_indexed(n, term, enabled());
}

// Serial reference path (same chunk layout, no OpenMP).
template <class F>
double sum_serial(std::int64_t n, F&& term) {
  return sum_indexed(n, term, false);
}

// Independent per-index work; each index owns its output slot.
template <class F>
void for_each(std::int64_t n, F&& body, bool parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
  (void)parallel;
}

template <class F>
void for_each(std::int64_t n, F&& body) {
  for_each(n, body, enabled());
}

inline void set_max_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace tubecurv::par
