#pragma once

// k-means over occurrence vectors, with silhouette-driven choice of both the
// number of clusters and the initialization.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "points.hpp"

namespace semshift {

struct Clustering {
  std::vector<std::size_t> assignments;
  Points centroids;
  std::size_t m = 0;
  std::vector<std::array<std::size_t, 2>> occupancy;  // per cluster: {n_1k, n_2k}
  double inertia = 0.0;
  double silhouette = 0.0;  // 0 for the k=1 fallback
  std::size_t iterations = 0;
};

struct ClusterConfig {
  std::size_t k_max = 10;
  std::size_t n_restarts = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const {
    if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
    if (n_restarts < 1) throw std::invalid_argument("n_restarts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
  }
};

namespace detail {

/// Index of each row's first equal row after lexicographic sort; used for
/// distinct counting and order-independent seeding.
struct DistinctRows {
  std::vector<std::size_t> representatives;  // one input index per distinct row, lexicographic order
  std::vector<std::size_t> multiplicity;
};

inline DistinctRows distinct_rows(const Points& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = points.row(a), rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::stable_sort(order.begin(), order.end(), less);
  DistinctRows out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || less(order[i - 1], order[i])) {
      out.representatives.push_back(order[i]);
      out.multiplicity.push_back(1);
    } else {
      ++out.multiplicity.back();
    }
  }
  return out;
}

inline void assign_nearest(const Points& points, const Points& centroids, std::vector<std::size_t>& labels,
                           std::vector<double>& sqdist) {
  const std::size_t n = points.size(), k = centroids.size();
  labels.assign(n, 0);
  sqdist.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = squared_distance(points.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    labels[i] = arg;
    sqdist[i] = best;
  }
}

// Moves the point farthest from its centroid (taken from a cluster with at
// least two members) into each empty cluster.
inline void repair_empty(std::size_t k, std::vector<std::size_t>& labels, std::vector<double>& sqdist) {
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t far = labels.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sizes[labels[i]] > 1 && sqdist[i] > far_d) {
        far_d = sqdist[i];
        far = i;
      }
    }
    if (far == labels.size()) throw std::logic_error("k-means: cannot repair empty cluster");
    --sizes[labels[far]];
    labels[far] = c;
    sqdist[far] = 0.0;
    ++sizes[c];
  }
}

inline Points cluster_means(const Points& points, const std::vector<std::size_t>& labels, std::size_t k) {
  const std::size_t d = points.dim();
  std::vector<double> sums(k * d, 0.0);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto r = points.row(i);
    double* s = sums.data() + labels[i] * d;
    for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
    ++sizes[labels[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] /= static_cast<double>(sizes[c]);
  }
  return Points(d, std::move(sums));
}

inline double inertia_of(const Points& points, const Points& centroids, const std::vector<std::size_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += squared_distance(points.row(i), centroids.row(labels[i]));
  return s;
}

inline std::vector<std::array<std::size_t, 2>> occupancy_of(const std::vector<std::size_t>& labels, std::size_t k,
                                                            std::span<const int> corpus_tags) {
  std::vector<std::array<std::size_t, 2>> occ(k, {0, 0});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int tag = corpus_tags.empty() ? 0 : corpus_tags[i];
    ++occ[labels[i]][tag == 0 ? 0 : 1];
  }
  return occ;
}

}  // namespace detail

inline std::size_t count_distinct(const Points& points) {
  return detail::distinct_rows(points).representatives.size();
}

/// Lloyd's algorithm from the given initial centroids. Stops at an assignment
/// fixed point, when the relative inertia decrease drops below `tol`, or after
/// `max_iters` assignment steps. If `inertia_trace` is given, the inertia after
/// every centroid update is appended to it (non-increasing).
inline Clustering kmeans(const Points& points, std::size_t k, const Points& init_centroids, std::size_t max_iters,
                         double tol, std::vector<double>* inertia_trace = nullptr) {
  if (points.empty()) throw std::invalid_argument("kmeans: empty input");
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (init_centroids.size() != k || init_centroids.dim() != points.dim()) {
    throw std::invalid_argument("kmeans: initial centroids do not match k and dim");
  }
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");
  if (k > count_distinct(points)) throw std::invalid_argument("kmeans: k exceeds number of distinct vectors");

  std::vector<std::size_t> labels, next;
  std::vector<double> sqdist;
  detail::assign_nearest(points, init_centroids, labels, sqdist);
  detail::repair_empty(k, labels, sqdist);
  Points centroids = detail::cluster_means(points, labels, k);
  double inertia = detail::inertia_of(points, centroids, labels);
  if (inertia_trace) inertia_trace->push_back(inertia);

  std::size_t iter = 1;
  for (; iter < max_iters; ++iter) {
    detail::assign_nearest(points, centroids, next, sqdist);
    detail::repair_empty(k, next, sqdist);
    if (next == labels) break;
    labels.swap(next);
    centroids = detail::cluster_means(points, labels, k);
    const double updated = detail::inertia_of(points, centroids, labels);
#ifdef SEMSHIFT_CHECK_INVARIANTS
    // Lloyd steps cannot raise inertia; the slack only absorbs summation rounding.
    if (updated > inertia * (1.0 + 1e-12)) throw std::logic_error("k-means: inertia increased");
#endif
    if (inertia_trace) inertia_trace->push_back(updated);
    const bool converged = inertia - updated <= tol * inertia;
    inertia = updated;
    if (converged) {
      ++iter;
      break;
    }
  }

  Clustering out;
  out.m = k;
  out.inertia = inertia;
  out.iterations = iter;
  out.assignments = std::move(labels);
  out.centroids = std::move(centroids);
  out.occupancy = detail::occupancy_of(out.assignments, k, {});
  return out;
}

/// Pairwise Euclidean distances, packed upper triangle.
class DistanceTable {
 public:
  explicit DistanceTable(const Points& points) : n_(points.size()) {
    table_.resize(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) table_[idx++] = euclidean_distance(points.row(i), points.row(j));
    }
  }

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return table_[i * (2 * n_ - i - 1) / 2 + (j - i - 1)];
  }

 private:
  std::size_t n_;
  std::vector<double> table_;
};

namespace detail {

template <class Dist>
double silhouette_impl(std::size_t n, const std::vector<std::size_t>& labels, Dist&& dist) {
  if (labels.size() != n) throw std::invalid_argument("silhouette: label count does not match input");
  std::size_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  std::size_t non_empty = 0;
  for (auto s : sizes) non_empty += s > 0 ? 1 : 0;
  if (non_empty < 2) throw std::invalid_argument("silhouette: needs at least 2 non-empty clusters");

  std::vector<double> sums(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[labels[j]] += dist(i, j);
    }
    const std::size_t own = labels[i];
    if (sizes[own] == 1) continue;  // singleton members score 0
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace detail

/// Mean silhouette (b - a) / max(a, b) over all points. Members of singleton
/// clusters score 0, as does a point with a = b = 0.
inline double silhouette_score(const Points& points, const std::vector<std::size_t>& assignments) {
  return detail::silhouette_impl(points.size(), assignments, [&](std::size_t i, std::size_t j) {
    return euclidean_distance(points.row(i), points.row(j));
  });
}

inline double silhouette_score(const DistanceTable& table, const std::vector<std::size_t>& assignments) {
  return detail::silhouette_impl(table.size(), assignments, table);
}

/// k-means++ seeding over the lexicographically sorted distinct rows, each
/// weighted by its multiplicity. Independent of input order.
template <class Engine>
Points kmeans_plus_plus(const Points& points, const detail::DistinctRows& distinct, std::size_t k, Engine& engine) {
  const std::size_t u = distinct.representatives.size();
  if (k > u) throw std::invalid_argument("kmeans++: k exceeds number of distinct vectors");
  auto pick = [&](const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double target = uniform01(engine) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (target < acc) return i;
    }
    return last_positive;
  };

  Points centroids(points.dim());
  std::vector<double> weights(distinct.multiplicity.begin(), distinct.multiplicity.end());
  std::vector<double> nearest(u, std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t chosen = pick(weights);
    auto row = points.row(distinct.representatives[chosen]);
    centroids.push_back(row);
    for (std::size_t i = 0; i < u; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points.row(distinct.representatives[i]), row));
      weights[i] = static_cast<double>(distinct.multiplicity[i]) * nearest[i];
    }
  }
  return centroids;
}

/// The k = 1 clustering: everything in one cluster around the mean.
inline Clustering single_cluster(const Points& points, std::span<const int> corpus_tags = {}) {
  if (points.empty()) throw std::invalid_argument("single_cluster: empty input");
  Clustering out;
  out.m = 1;
  out.assignments.assign(points.size(), 0);
  out.centroids = detail::cluster_means(points, out.assignments, 1);
  out.inertia = detail::inertia_of(points, out.centroids, out.assignments);
  out.occupancy = detail::occupancy_of(out.assignments, 1, corpus_tags);
  return out;
}

// Inputs with this many points or fewer get a precomputed distance table.
inline constexpr std::size_t kDistanceTableLimit = 4096;

/// Tries every k in 2..min(k_max, distinct), `n_restarts` seeded k-means++
/// runs each, and keeps the run with the highest silhouette. Ties go to the
/// smaller k, then lower inertia, then earlier restart. Inputs with fewer than
/// four vectors or fewer than two distinct vectors get the k = 1 clustering.
/// `corpus_tags` (0 for C1, 1 for C2; empty means all C1) fills occupancy.
inline Clustering select_and_cluster(const Points& points, std::span<const int> corpus_tags,
                                     const ClusterConfig& config) {
  config.validate();
  if (points.empty()) throw std::invalid_argument("select_and_cluster: empty input");
  if (!corpus_tags.empty() && corpus_tags.size() != points.size()) {
    throw std::invalid_argument("select_and_cluster: corpus tag count does not match input");
  }
  const auto distinct = detail::distinct_rows(points);
  const std::size_t u = distinct.representatives.size();
  if (points.size() < 4 || u < 2) return single_cluster(points, corpus_tags);

  std::optional<DistanceTable> table;
  if (points.size() <= kDistanceTableLimit) table.emplace(points);

  Clustering best;
  bool have_best = false;
  const std::size_t k_hi = std::min(config.k_max, u);
  for (std::size_t k = 2; k <= k_hi; ++k) {
    for (std::size_t r = 0; r < config.n_restarts; ++r) {
      std::mt19937_64 engine(derive_seed(config.seed, k, r));
      Points init = kmeans_plus_plus(points, distinct, k, engine);
      Clustering run = kmeans(points, k, init, config.max_iters, config.tol);
      run.silhouette = table ? silhouette_score(*table, run.assignments) : silhouette_score(points, run.assignments);
      // k and r only increase, so a strictly better silhouette or an equal
      // silhouette with strictly lower inertia is what can displace the incumbent.
      const bool better = !have_best || run.silhouette > best.silhouette ||
                          (run.silhouette == best.silhouette && run.m == best.m && run.inertia < best.inertia);
      if (better) {
        best = std::move(run);
        have_best = true;
      }
    }
  }
  best.occupancy = detail::occupancy_of(best.assignments, best.m, corpus_tags);
  return best;
}

}  // namespace semshift
