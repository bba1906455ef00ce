#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "semshift/assignment.hpp"

using namespace semshift;

namespace {

oracle::Matrix to_matrix(const CostMatrix& c) {
  oracle::Matrix m(c.size, std::vector<double>(c.size));
  for (std::size_t i = 0; i < c.size; ++i) {
    for (std::size_t j = 0; j < c.size; ++j) m[i][j] = c(i, j);
  }
  return m;
}

void expect_bijection(const Matching& m, std::size_t n) {
  ASSERT_EQ(m.pairs.size(), n);
  std::set<std::size_t> rows, cols;
  for (auto [r, c] : m.pairs) {
    rows.insert(r);
    cols.insert(c);
  }
  EXPECT_EQ(rows.size(), n);
  EXPECT_EQ(cols.size(), n);
}

}  // namespace

TEST(CostMatrix, ThreeFourFive) {
  const auto c = build_cost_matrix(Points(2, {0, 0}), Points(2, {3, 4}));
  ASSERT_EQ(c.size, 1u);
  EXPECT_DOUBLE_EQ(c(0, 0), 5.0);
}

TEST(CostMatrix, DummyColumnIsZero) {
  const auto c = build_cost_matrix(Points(1, {0, 7}), Points(1, {2}));
  ASSERT_EQ(c.size, 2u);
  EXPECT_EQ(c.real_rows, 2u);
  EXPECT_EQ(c.real_cols, 1u);
  EXPECT_DOUBLE_EQ(c(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 5.0);
  EXPECT_EQ(c(0, 1), 0.0);
  EXPECT_EQ(c(1, 1), 0.0);
}

TEST(CostMatrix, IdenticalCentroidsGiveZeroDiagonal) {
  const Points p(3, {1, 2, 3, -4, 5, 6, 0, 0, 9});
  const auto c = build_cost_matrix(p, p);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c(i, i), 0.0);
  EXPECT_GT(c(0, 1), 0.0);
}

TEST(CostMatrix, Errors) {
  EXPECT_THROW(build_cost_matrix(Points(2, {0, 0}), Points(3, {0, 0, 0})), std::invalid_argument);
  EXPECT_THROW(build_cost_matrix(Points(2), Points(2, {0, 0})), std::invalid_argument);
}

TEST(Hungarian, TwoByTwo) {
  const auto m = hungarian(CostMatrix::square(2, {1, 2, 2, 1}));
  EXPECT_EQ(m.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(m.total_cost, 2.0);
}

TEST(Hungarian, AllZeroPicksIdentity) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto m = hungarian(CostMatrix::square(n, std::vector<double>(n * n, 0.0)));
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(m.pairs[i].second, i);
    EXPECT_EQ(m.total_cost, 0.0);
  }
}

TEST(Hungarian, LexicographicallySmallestAmongTies) {
  // Both (0->1, 1->0, 2->2) and (0->2, 1->0, 2->1) etc. cost 3; the smallest map wins.
  const auto m = hungarian(CostMatrix::square(3, {2, 1, 1, 1, 2, 2, 2, 1, 1}));
  EXPECT_DOUBLE_EQ(m.total_cost, 3.0);
  EXPECT_EQ(m.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}, {2, 2}}));
}

TEST(Hungarian, MatchesPermutationOracle) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<double> v(n * n);
      for (auto& x : v) x = uniform01(rng) * 100.0;
      const auto cm = CostMatrix::square(n, v);
      const auto m = hungarian(cm);
      expect_bijection(m, n);
      const double best = oracle::min_assignment(to_matrix(cm));
      EXPECT_LE(std::abs(m.total_cost - best), 1e-9 * std::max(1.0, best));
    }
  }
}

TEST(Hungarian, IntegerCostsExact) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    std::vector<double> v(n * n);
    for (auto& x : v) x = static_cast<double>(rng() % 4);  // many ties
    const auto cm = CostMatrix::square(n, v);
    EXPECT_EQ(hungarian(cm).total_cost, oracle::min_assignment(to_matrix(cm)));
  }
}

TEST(Hungarian, DummyNeutralityAndPureSets) {
  // With padding, the real part of the matching is an optimal injection of the
  // smaller side into the larger one.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m1 = 1 + rng() % 5, m2 = 1 + rng() % 5, d = 3;
    std::vector<double> a(m1 * d), b(m2 * d);
    for (auto& x : a) x = uniform01(rng) * 10;
    for (auto& x : b) x = uniform01(rng) * 10;
    const auto cm = build_cost_matrix(Points(d, a), Points(d, b));
    const auto m = hungarian(cm);
    expect_bijection(m, std::max(m1, m2));

    oracle::Matrix real;
    const bool rows_small = m1 <= m2;
    for (std::size_t i = 0; i < (rows_small ? m1 : m2); ++i) {
      real.emplace_back();
      for (std::size_t j = 0; j < (rows_small ? m2 : m1); ++j) {
        real.back().push_back(rows_small ? cm(i, j) : cm(j, i));
      }
    }
    EXPECT_NEAR(m.total_cost, oracle::min_injection(real), 1e-9);

    EXPECT_EQ(m.pure_in_c1.size(), m1 > m2 ? m1 - m2 : 0u);
    EXPECT_EQ(m.pure_in_c2.size(), m2 > m1 ? m2 - m1 : 0u);
    for (auto r : m.pure_in_c1) EXPECT_GE(m.pairs[r].second, m2);
  }
}

TEST(Hungarian, RejectsNonFinite) {
  EXPECT_THROW(hungarian(CostMatrix::square(2, {0, 1, std::nan(""), 0})), std::invalid_argument);
}
