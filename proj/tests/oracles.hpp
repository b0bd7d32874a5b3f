#pragma once

// Test-only reference computations. Nothing here calls into the elimination
// code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using IntMatrix = std::vector<std::vector<long long>>;

/// Leibniz determinant of a small square integer matrix.
inline long long det(const IntMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long long total = 0;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    long long term = inversions % 2 ? -1 : 1;
    for (std::size_t i = 0; i < n && term != 0; ++i) term *= m[i][perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  for (;;) {
    if (!f(idx)) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Rank as the size of the largest nonvanishing minor.
inline std::size_t rank_by_minors(const IntMatrix& m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (std::size_t k = std::min(rows, cols); k > 0; --k) {
    bool found = false;
    for_each_subset(rows, k, [&](const std::vector<std::size_t>& ri) {
      for_each_subset(cols, k, [&](const std::vector<std::size_t>& ci) {
        IntMatrix sub(k, std::vector<long long>(k));
        for (std::size_t a = 0; a < k; ++a)
          for (std::size_t b = 0; b < k; ++b) sub[a][b] = m[ri[a]][ci[b]];
        if (det(sub) != 0) found = true;
        return !found;
      });
      return !found;
    });
    if (found) return k;
  }
  return 0;
}

/// All integer vectors with entries in [lo, hi] (excluding zero) that
/// satisfy m v = 0.
inline std::vector<std::vector<long long>> integer_kernel(const IntMatrix& m, std::size_t cols, long long lo, long long hi) {
  std::vector<std::vector<long long>> out;
  std::vector<long long> v(cols, lo);
  for (;;) {
    bool nonzero = std::any_of(v.begin(), v.end(), [](long long x) { return x != 0; });
    bool ok = nonzero;
    for (std::size_t i = 0; ok && i < m.size(); ++i) {
      long long s = 0;
      for (std::size_t j = 0; j < cols; ++j) s += m[i][j] * v[j];
      ok = s == 0;
    }
    if (ok) out.push_back(v);
    std::size_t k = 0;
    while (k < cols && v[k] == hi) v[k++] = lo;
    if (k == cols) return out;
    ++v[k];
  }
}

inline IntMatrix random_int_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntMatrix m(rows, std::vector<long long>(cols));
  for (auto& r : m)
    for (auto& x : r) x = d(rng);
  return m;
}

}  // namespace oracle
