#ifndef UKLAB_PARALLEL_HPP
#define UKLAB_PARALLEL_HPP

#include <cstdint>
#include <vector>

#include "uklab/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace uklab {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Parallel loop over [0, n).  Iterations must be independent.
template <class Body>
inline void parallel_for(int64_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) body(i);
#else
  for (int64_t i = 0; i < n; ++i) body(i);
#endif
}

/// Deterministic parallel reduction: the index range is cut into a fixed
/// number of blocks (independent of thread count), block partials are
/// accumulated left to right within a block and the partials are combined
/// serially in block order.  Result is bitwise identical across thread
/// counts and reruns.
template <class Term>
inline double block_sum(int64_t n, Term&& term, int64_t blocks = 512) {
  if (n <= 0) return 0.0;
  if (blocks > n) blocks = n;
  std::vector<double> partial(static_cast<size_t>(blocks), 0.0);
  const int64_t chunk = (n + blocks - 1) / blocks;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int64_t b = 0; b < blocks; ++b) {
    const int64_t lo = b * chunk;
    const int64_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<size_t>(b)] = s;
  }
#else
  for (int64_t b = 0; b < blocks; ++b) {
    const int64_t lo = b * chunk;
    const int64_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<size_t>(b)] = s;
  }
#endif
  return pairwise_sum(partial);
}

}  // namespace uklab

#endif  // UKLAB_PARALLEL_HPP
