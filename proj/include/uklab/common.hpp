#ifndef UKLAB_COMMON_HPP
#define UKLAB_COMMON_HPP

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uklab {

using std::int64_t;
using std::size_t;
using std::uint64_t;

/// Thrown when an operation's preconditions are not met (unresolvable
/// scales, invalid parameters, separation violations, ...).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a tensor would exceed the configured memory budget.
/// Carries the number of bytes the request would have needed.
class MemoryBudgetError : public std::runtime_error {
 public:
  MemoryBudgetError(const std::string& what, uint64_t required)
      : std::runtime_error(what), required_bytes(required) {}
  uint64_t required_bytes;
};

constexpr uint64_t kDefaultMemoryBudgetBytes = 3ull << 30;  // 3 GiB

inline bool is_power_of_two(int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(int64_t n) {
  int l = 0;
  while ((int64_t{1} << l) < n) ++l;
  if ((int64_t{1} << l) != n) throw PreconditionError("log2_exact: not a power of two");
  return l;
}

/// Sums a[0..n) by recursive halving.  For 2^m equal summands every
/// partial is an exact power-of-two multiple, which the dyadic module
/// relies on for bit-exact idempotence of cube averages (a linear base
/// case would round 3x and spoil it).
inline double pairwise_sum(const double* a, size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return a[0];
  if (n == 2) return a[0] + a[1];
  size_t h = n / 2;
  return pairwise_sum(a, h) + pairwise_sum(a + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

/// Row-major indexing over a multi-axis box, all axes the same length.
struct MultiIndexer {
  int axes = 0;
  int64_t n = 0;     // length per axis (power of two)
  int64_t mask = 0;  // n - 1
  int64_t total = 0;

  MultiIndexer() = default;
  MultiIndexer(int axes_, int64_t n_) : axes(axes_), n(n_), mask(n_ - 1) {
    total = 1;
    for (int a = 0; a < axes; ++a) {
      if (total > (int64_t{1} << 56) / n) throw PreconditionError("index space overflow");
      total *= n;
    }
  }

  int64_t flatten(const int64_t* idx) const {
    int64_t f = 0;
    for (int a = 0; a < axes; ++a) f = f * n + (idx[a] & mask);
    return f;
  }
  void unflatten(int64_t f, int64_t* idx) const {
    for (int a = axes - 1; a >= 0; --a) {
      idx[a] = f & mask;
      f /= n;
    }
  }
};

}  // namespace uklab

#endif  // UKLAB_COMMON_HPP
