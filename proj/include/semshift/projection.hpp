#pragma once

// 2-D projection onto the first two principal components, for diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "points.hpp"

namespace semshift {

namespace detail {

// y = C v with C the covariance of the centered rows, without forming C.
inline std::vector<double> covariance_times(const Points& centered, const std::vector<double>& v) {
  std::vector<double> y(centered.dim(), 0.0);
  for (std::size_t i = 0; i < centered.size(); ++i) {
    auto r = centered.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) dot += r[j] * v[j];
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += dot * r[j];
  }
  return y;
}

inline double normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
  return n;
}

}  // namespace detail

/// Principal axes by power iteration with deflation. Each axis is signed so
/// that its largest-magnitude component is positive. Returns one (x, y) per row.
inline std::vector<std::array<double, 2>> project_2d(const Points& points, std::size_t max_iters = 1000,
                                                     double tol = 1e-12) {
  const std::size_t n = points.size(), d = points.dim();
  std::vector<std::array<double, 2>> out(n, {0.0, 0.0});
  if (n == 0) return out;

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += points.row(i)[j];
  }
  for (double& x : mean) x /= static_cast<double>(n);
  std::vector<double> centered_data;
  centered_data.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered_data.push_back(points.row(i)[j] - mean[j]);
  }
  const Points centered(d, std::move(centered_data));

  std::vector<std::vector<double>> axes;
  for (std::size_t a = 0; a < std::min<std::size_t>(2, d); ++a) {
    std::vector<double> v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = 1.0 + 0.1 * static_cast<double>(j % 7);
    auto deflate = [&](std::vector<double>& x) {
      for (const auto& prev : axes) {
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += x[j] * prev[j];
        for (std::size_t j = 0; j < d; ++j) x[j] -= dot * prev[j];
      }
    };
    deflate(v);
    detail::normalize(v);
    for (std::size_t it = 0; it < max_iters; ++it) {
      auto w = detail::covariance_times(centered, v);
      deflate(w);
      if (detail::normalize(w) == 0.0) {
        v.assign(d, 0.0);
        break;
      }
      double diff = 0.0;
      for (std::size_t j = 0; j < d; ++j) diff = std::max(diff, std::abs(w[j] - v[j]));
      v.swap(w);
      if (diff < tol) break;
    }
    const auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (big != v.end() && *big < 0.0) {
      for (double& x : v) x = -x;
    }
    axes.push_back(std::move(v));
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto r = centered.row(i);
    for (std::size_t a = 0; a < axes.size(); ++a) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += r[j] * axes[a][j];
      out[i][a] = dot;
    }
  }
  return out;
}

}  // namespace semshift
