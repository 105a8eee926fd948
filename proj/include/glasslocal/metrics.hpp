#pragma once

// Distances between spin-sample batches: the normalized empirical W2 by
// optimal assignment, and the cross-overlap second moment.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "glasslocal/errors.hpp"
#include "glasslocal/exact.hpp"

namespace glasslocal {

inline constexpr int kW2BatchCap = 2000;

/// Minimum-cost perfect matching on a square integer cost matrix (row-major).
/// Returns the optimal total cost; assignment[i] is the column matched to row i.
inline std::int64_t hungarian(const std::vector<std::int64_t>& cost, int m, std::vector<int>* assignment = nullptr) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(m + 1, 0), v(m + 1, 0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= m; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      const std::int64_t* row = cost.data() + static_cast<std::size_t>(i0 - 1) * m;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::int64_t total = 0;
  if (assignment) assignment->assign(m, -1);
  for (int j = 1; j <= m; ++j) {
    total += cost[static_cast<std::size_t>(p[j] - 1) * m + (j - 1)];
    if (assignment) (*assignment)[p[j] - 1] = j - 1;
  }
  return total;
}

/// sqrt of the mean matched cost |x - y|^2 / n over an optimal assignment.
/// For +-1 entries |x - y|^2 = 4 * Hamming(x, y), so the matching is exact
/// in integer arithmetic.
inline double empirical_w2(const SampleBatch& a, const SampleBatch& b) {
  if (a.size() != b.size() || a.n() != b.n()) throw ShapeError("empirical_w2: batches differ in size or dimension");
  const int M = a.size(), n = a.n();
  if (M > kW2BatchCap) throw CapacityError("empirical_w2: M = " + std::to_string(M) + " exceeds cap " + std::to_string(kW2BatchCap));
  if (M == 0 || n == 0) return 0.0;
  // Hamming = (n - <x, y>) / 2
  const Mat inner = a.x * b.x.transpose();
  std::vector<std::int64_t> cost(static_cast<std::size_t>(M) * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) cost[static_cast<std::size_t>(i) * M + j] = std::llround((n - inner(i, j)) / 2.0);
  const std::int64_t hamming = hungarian(cost, M);
  return std::sqrt(4.0 * static_cast<double>(hamming) / (static_cast<double>(n) * M));
}

/// Mean over all cross pairs of (<x, x'> / n)^2.
inline double overlap_moment(const SampleBatch& a, const SampleBatch& b) {
  if (a.size() == 0 || b.size() == 0) throw ShapeError("overlap_moment: batches must be nonempty");
  if (a.n() != b.n()) throw ShapeError("overlap_moment: dimension mismatch");
  const double n = a.n();
  const double pairs = static_cast<double>(a.size()) * b.size();
  double s;
  if (static_cast<double>(a.n()) * a.n() < pairs) {
    // sum_{kl} S^a_{kl} S^b_{kl}, S = X^T X
    const Mat sa = a.x.transpose() * a.x, sb = b.x.transpose() * b.x;
    s = sa.cwiseProduct(sb).sum();
  } else {
    s = (a.x * b.x.transpose()).squaredNorm();
  }
  return s / (pairs * n * n);
}

}  // namespace glasslocal
