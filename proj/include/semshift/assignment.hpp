#pragma once

// Minimum-weight perfect matching between two cluster sets, padding the
// smaller side with zero-cost dummy clusters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "points.hpp"

namespace semshift {

struct CostMatrix {
  std::size_t size = 0;       // max(real_rows, real_cols)
  std::size_t real_rows = 0;  // clusters of C1
  std::size_t real_cols = 0;  // clusters of C2
  std::vector<double> costs;  // size * size, row-major

  double operator()(std::size_t i, std::size_t j) const noexcept { return costs[i * size + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return costs[i * size + j]; }

  /// Square matrix with no dummy rows or columns.
  static CostMatrix square(std::size_t n, std::vector<double> values) {
    if (values.size() != n * n) throw std::invalid_argument("CostMatrix: expected n*n values");
    return CostMatrix{n, n, n, std::move(values)};
  }
};

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;
  std::vector<std::size_t> pure_in_c1;  // real rows matched to dummy columns
  std::vector<std::size_t> pure_in_c2;  // real columns matched to dummy rows
};

/// Distances between centers of mass; dummy entries are 0.
inline CostMatrix build_cost_matrix(const Points& centroids_c1, const Points& centroids_c2) {
  if (centroids_c1.empty() || centroids_c2.empty()) {
    throw std::invalid_argument("build_cost_matrix: both centroid lists must be non-empty");
  }
  if (centroids_c1.dim() != centroids_c2.dim()) {
    throw std::invalid_argument("build_cost_matrix: centroid dimension mismatch");
  }
  CostMatrix cm;
  cm.real_rows = centroids_c1.size();
  cm.real_cols = centroids_c2.size();
  cm.size = std::max(cm.real_rows, cm.real_cols);
  cm.costs.assign(cm.size * cm.size, 0.0);
  for (std::size_t i = 0; i < cm.real_rows; ++i) {
    for (std::size_t j = 0; j < cm.real_cols; ++j) {
      cm(i, j) = euclidean_distance(centroids_c1.row(i), centroids_c2.row(j));
    }
  }
  return cm;
}

namespace detail {

// Shortest augmenting path Hungarian method with row/column potentials.
// Returns row -> column for an n x n matrix. O(n^3).
inline std::vector<std::size_t> hungarian_rows(const std::vector<double>& c, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match_col[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match_col[j] - 1] = j - 1;
  return row_to_col;
}

inline double assignment_cost(const std::vector<double>& c, std::size_t n, const std::vector<std::size_t>& perm) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
  return s;
}

}  // namespace detail

/// Optimal assignment via the Hungarian method. Among optimal assignments the
/// lexicographically smallest row -> column map is returned: rows are fixed
/// one at a time to the lowest column whose completion cost is minimal.
inline Matching hungarian(const CostMatrix& cm) {
  const std::size_t n = cm.size;
  if (n == 0 || cm.costs.size() != n * n) throw std::invalid_argument("hungarian: malformed cost matrix");
  for (double x : cm.costs) {
    if (!std::isfinite(x)) throw std::invalid_argument("hungarian: non-finite cost");
  }

  std::vector<std::size_t> perm(n);
  std::vector<std::size_t> free_cols(n);
  std::iota(free_cols.begin(), free_cols.end(), 0);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t rest = n - row - 1;
    std::size_t best_col = free_cols.front();
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < free_cols.size(); ++idx) {
      const std::size_t col = free_cols[idx];
      double cost = cm(row, col);
      if (rest > 0) {
        std::vector<double> sub;
        sub.reserve(rest * rest);
        std::vector<std::size_t> sub_cols;
        for (std::size_t k = 0; k < free_cols.size(); ++k) {
          if (k != idx) sub_cols.push_back(free_cols[k]);
        }
        for (std::size_t r = row + 1; r < n; ++r) {
          for (std::size_t sc : sub_cols) sub.push_back(cm(r, sc));
        }
        cost += detail::assignment_cost(sub, rest, detail::hungarian_rows(sub, rest));
      }
      if (cost < best_cost) {
        best_cost = cost;
        best_col = col;
      }
    }
    perm[row] = best_col;
    std::erase(free_cols, best_col);
  }

  Matching m;
  for (std::size_t i = 0; i < n; ++i) {
    m.pairs.emplace_back(i, perm[i]);
    m.total_cost += cm(i, perm[i]);
    if (i < cm.real_rows && perm[i] >= cm.real_cols) m.pure_in_c1.push_back(i);
    if (i >= cm.real_rows && perm[i] < cm.real_cols) m.pure_in_c2.push_back(perm[i]);
  }
  std::sort(m.pure_in_c2.begin(), m.pure_in_c2.end());
  return m;
}

}  // namespace semshift
