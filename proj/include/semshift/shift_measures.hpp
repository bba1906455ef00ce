#pragma once

// Count-based change quantities over sense clusters: the binary decision
// rule, smoothed sense distributions, the symmetrized KL distance, and the
// total-variation change coefficient.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace semshift {

/// Per-cluster occurrence counts for both corpora.
struct SenseCounts {
  std::vector<std::uint64_t> c1;
  std::vector<std::uint64_t> c2;

  SenseCounts() = default;
  SenseCounts(std::vector<std::uint64_t> counts_c1, std::vector<std::uint64_t> counts_c2)
      : c1(std::move(counts_c1)), c2(std::move(counts_c2)) {
    validate();
  }

  std::size_t m() const noexcept { return c1.size(); }
  std::uint64_t total_c1() const noexcept { return sum(c1); }
  std::uint64_t total_c2() const noexcept { return sum(c2); }

  void validate() const {
    if (c1.empty()) throw std::invalid_argument("SenseCounts: need at least one cluster");
    if (c1.size() != c2.size()) throw std::invalid_argument("SenseCounts: corpus count vectors differ in length");
    if (total_c1() == 0 || total_c2() == 0) {
      throw std::invalid_argument("SenseCounts: each corpus needs at least one occurrence");
    }
  }

  bool operator==(const SenseCounts&) const = default;

 private:
  static std::uint64_t sum(const std::vector<std::uint64_t>& v) noexcept {
    std::uint64_t s = 0;
    for (auto x : v) s += x;
    return s;
  }
};

struct DecisionThresholds {
  std::uint64_t lower_bound = 5;  // minimum size of a gained/kept sense
  std::uint64_t upper_bound = 2;  // maximum size of an absent sense
  bool strict_zero = false;       // changed iff some cluster has a zero count

  void validate() const {
    if (!(lower_bound > upper_bound)) {
      throw std::invalid_argument("DecisionThresholds: lower bound must exceed upper bound");
    }
  }
};

enum class Direction { gained, lost };

inline const char* to_string(Direction d) { return d == Direction::gained ? "gained" : "lost"; }

struct Witness {
  std::size_t cluster = 0;
  Direction direction = Direction::gained;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;

  bool operator==(const Witness&) const = default;
};

struct ChangeVerdict {
  std::string word;
  bool changed = false;
  std::vector<Witness> witnesses;
};

struct SenseDistribution {
  std::vector<double> probs;
  double sigma = 1.0;
};

enum class ShiftMeasure { sj_distance, coefficient };

inline const char* to_string(ShiftMeasure m) { return m == ShiftMeasure::sj_distance ? "jsd" : "coefficient"; }

struct ShiftScore {
  std::string word;
  double value = 0.0;
  ShiftMeasure measure = ShiftMeasure::sj_distance;
};

/// Strict mode: a cluster with no C1 occurrences is a gained sense, one with
/// no C2 occurrences a lost sense. Bounded mode: gained iff n1 <= upper and
/// n2 >= lower, lost iff n2 <= upper and n1 >= lower. Either direction counts.
inline ChangeVerdict decide_change(const SenseCounts& counts, const DecisionThresholds& thresholds) {
  counts.validate();
  thresholds.validate();
  ChangeVerdict v;
  for (std::size_t k = 0; k < counts.m(); ++k) {
    const auto n1 = counts.c1[k], n2 = counts.c2[k];
    if (thresholds.strict_zero) {
      if (n1 == 0) v.witnesses.push_back({k, Direction::gained, n1, n2});
      if (n2 == 0) v.witnesses.push_back({k, Direction::lost, n1, n2});
    } else {
      if (n1 <= thresholds.upper_bound && n2 >= thresholds.lower_bound) {
        v.witnesses.push_back({k, Direction::gained, n1, n2});
      }
      if (n2 <= thresholds.upper_bound && n1 >= thresholds.lower_bound) {
        v.witnesses.push_back({k, Direction::lost, n1, n2});
      }
    }
  }
  v.changed = !v.witnesses.empty();
  return v;
}

/// Posterior mean under a uniform Dirichlet prior of total mass `sigma`:
/// p_k = (n_k + sigma/m) / (sum n + sigma).
inline SenseDistribution smooth(std::span<const std::uint64_t> counts, double sigma) {
  if (counts.empty()) throw std::invalid_argument("smooth: need at least one cluster");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("smooth: sigma must be positive");
  const double m = static_cast<double>(counts.size());
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  SenseDistribution d;
  d.sigma = sigma;
  d.probs.reserve(counts.size());
  for (auto c : counts) d.probs.push_back((static_cast<double>(c) + sigma / m) / (total + sigma));
  return d;
}

/// 0.5 * (KL(p||q) + KL(q||p)), natural log. Both inputs must be strictly positive.
inline double sj_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("sj_distance: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(p[k] > 0.0) || !(q[k] > 0.0)) throw std::invalid_argument("sj_distance: non-positive probability");
    // p ln(p/q) + q ln(q/p) = (p - q)(ln p - ln q), which is exactly symmetric in floating point
    s += (p[k] - q[k]) * (std::log(p[k]) - std::log(q[k]));
  }
  return 0.5 * s;
}

inline double sj_distance(const SenseDistribution& p, const SenseDistribution& q) {
  return sj_distance(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

/// sum_k |S2 n1k - S1 n2k| / (2 S1 S2), i.e. the total-variation distance
/// between the two corpora's cluster proportions. In [0, 1].
inline double change_coefficient(const SenseCounts& counts) {
  counts.validate();
  const std::uint64_t s1 = counts.total_c1(), s2 = counts.total_c2();
  if (s1 > (1ULL << 31) || s2 > (1ULL << 31)) throw std::overflow_error("change_coefficient: counts too large");
  std::uint64_t numerator = 0;  // sum <= 2 * S1 * S2 < 2^63
  for (std::size_t k = 0; k < counts.m(); ++k) {
    const std::uint64_t a = s2 * counts.c1[k], b = s1 * counts.c2[k];
    numerator += a > b ? a - b : b - a;
  }
  return static_cast<double>(numerator) / (2.0 * static_cast<double>(s1) * static_cast<double>(s2));
}

/// The configured graded measure on one set of counts.
inline ShiftScore shift_score(const std::string& word, const SenseCounts& counts, ShiftMeasure measure,
                              double sigma) {
  ShiftScore s;
  s.word = word;
  s.measure = measure;
  if (measure == ShiftMeasure::coefficient) {
    s.value = change_coefficient(counts);
  } else {
    s.value = sj_distance(smooth(counts.c1, sigma), smooth(counts.c2, sigma));
  }
  return s;
}

}  // namespace semshift
