#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "semshift/pipelines.hpp"
#include "semshift/synthetic.hpp"
#include "test_util.hpp"

using namespace semshift;
using testing_util::TempDir;

namespace {

// `copies[s]` repetitions of point-mass sense s at 20 * e_s.
EmbeddingSet point_masses(const std::string& word, CorpusId corpus, const std::vector<std::size_t>& copies,
                          std::uint32_t dim = 4) {
  EmbeddingSet set;
  set.word = word;
  set.corpus = corpus;
  set.dim = dim;
  for (std::size_t s = 0; s < copies.size(); ++s) {
    std::vector<float> v(dim, 0.0f);
    v[s] = 20.0f;
    for (std::size_t i = 0; i < copies[s]; ++i) set.add(v);
  }
  return set;
}

PipelineConfig config(Method method, ShiftMeasure measure = ShiftMeasure::sj_distance) {
  PipelineConfig c;
  c.method = method;
  c.s2_measure = measure;
  c.cluster.seed = 2024;
  return c;
}

// Counts as a multiset of (n1, n2) pairs, ignoring cluster order.
std::vector<std::pair<std::uint64_t, std::uint64_t>> count_pairs(const SenseCounts& c) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::size_t k = 0; k < c.m(); ++k) out.emplace_back(c.c1[k], c.c2[k]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Method1, PlantedGainedSense) {
  synthetic::SenseLayout layout;  // d = 8, separation 20, spread 1
  const auto w = synthetic::make_word("bank", SenseCounts({100, 0}, {100, 30}), true, layout, 3);
  const auto r = run_method1(w.c1, w.c2, config(Method::m1));
  ASSERT_EQ(r.m(), 2u);
  EXPECT_EQ(count_pairs(r.counts), (std::vector<std::pair<std::uint64_t, std::uint64_t>>{{0, 30}, {100, 100}}));
  EXPECT_TRUE(r.verdict.changed);
  ASSERT_EQ(r.verdict.witnesses.size(), 1u);
  EXPECT_EQ(r.verdict.witnesses[0].direction, Direction::gained);
  EXPECT_GT(r.score.value, 0.0);
  EXPECT_EQ(r.senses_c1.size(), 100u);
  EXPECT_EQ(r.senses_c2.size(), 130u);
}

TEST(Method1, IdenticalCorporaShowNoChange) {
  synthetic::SenseLayout layout;
  auto w = synthetic::make_word("same", SenseCounts({60, 40}, {60, 40}), false, layout, 4);
  w.c2.values = w.c1.values;
  const auto r = run_method1(w.c1, w.c2, config(Method::m1, ShiftMeasure::coefficient));
  for (std::size_t k = 0; k < r.m(); ++k) EXPECT_EQ(r.counts.c1[k], r.counts.c2[k]);
  EXPECT_FALSE(r.verdict.changed);
  EXPECT_EQ(r.score.value, 0.0);
}

TEST(Method1, TipOccupancyReplay) {
  const auto c1 = point_masses("tip", CorpusId::C1, {112, 1});
  const auto c2 = point_masses("tip", CorpusId::C2, {211, 30});
  const auto r = run_method1(c1, c2, config(Method::m1));
  EXPECT_EQ(count_pairs(r.counts), (std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 30}, {112, 211}}));
  ASSERT_TRUE(r.verdict.changed);
  EXPECT_EQ(r.verdict.witnesses[0].direction, Direction::gained);
  EXPECT_EQ(r.verdict.witnesses[0].n1, 1u);
  EXPECT_EQ(r.verdict.witnesses[0].n2, 30u);
}

TEST(Method1, BothMeasuresShareCounts) {
  synthetic::SenseLayout layout;
  const auto w = synthetic::make_word("w", SenseCounts({50, 50, 2}, {50, 50, 60}), true, layout, 5);
  const auto a = run_method1(w.c1, w.c2, config(Method::m1, ShiftMeasure::sj_distance));
  const auto b = run_method1(w.c1, w.c2, config(Method::m1, ShiftMeasure::coefficient));
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(b.score.value, change_coefficient(a.counts));
  EXPECT_EQ(a.score.value, sj_distance(smooth(a.counts.c1, 1.0), smooth(a.counts.c2, 1.0)));
}

TEST(Method2, SingleClusterEachSideMerges) {
  const auto c1 = point_masses("w", CorpusId::C1, {50});
  auto c2 = point_masses("w", CorpusId::C2, {0, 60});
  const auto r = run_method2(c1, c2, config(Method::m2));
  ASSERT_EQ(r.m(), 1u);
  EXPECT_EQ(r.counts.c1[0], 50u);
  EXPECT_EQ(r.counts.c2[0], 60u);
  EXPECT_FALSE(r.verdict.changed);
  ASSERT_TRUE(r.matching);
  EXPECT_EQ(r.matching->m1, 1u);
  EXPECT_EQ(r.matching->m2, 1u);
  EXPECT_TRUE(r.matching->pure_in_c1.empty());
}

TEST(Method2, ExtraOldClusterIsLostSense) {
  const auto c1 = point_masses("w", CorpusId::C1, {40, 10});
  const auto c2 = point_masses("w", CorpusId::C2, {50});
  const auto r = run_method2(c1, c2, config(Method::m2));
  ASSERT_TRUE(r.matching);
  EXPECT_EQ(r.matching->m1, 2u);
  EXPECT_EQ(r.matching->m2, 1u);
  ASSERT_EQ(r.matching->pure_in_c1.size(), 1u);
  EXPECT_EQ(count_pairs(r.counts), (std::vector<std::pair<std::uint64_t, std::uint64_t>>{{10, 0}, {40, 50}}));
  ASSERT_TRUE(r.verdict.changed);
  EXPECT_EQ(r.verdict.witnesses[0].direction, Direction::lost);
}

TEST(Method2, MatchingPairsSharedSensesOptimally) {
  synthetic::SenseLayout layout;
  // C1 has senses 0 and 1; C2 has senses 0, 1 and a new sense 2.
  const auto w = synthetic::make_word("w", SenseCounts({60, 40, 0}, {50, 30, 40}), true, layout, 6);
  const auto r = run_method2(w.c1, w.c2, config(Method::m2));
  ASSERT_TRUE(r.matching);
  ASSERT_EQ(r.matching->m1, 2u);
  ASSERT_EQ(r.matching->m2, 3u);
  EXPECT_EQ(count_pairs(r.counts),
            (std::vector<std::pair<std::uint64_t, std::uint64_t>>{{0, 40}, {40, 30}, {60, 50}}));
  ASSERT_EQ(r.matching->pure_in_c2.size(), 1u);
  EXPECT_TRUE(r.verdict.changed);

  // recompute the padded cost matrix from the separate clusterings and check optimality
  ClusterConfig cc1 = config(Method::m2).cluster, cc2 = cc1;
  const auto seed = word_seed(cc1.seed, "w");
  cc1.seed = derive_seed(seed, "C1");
  cc2.seed = derive_seed(seed, "C2");
  const auto k1 = select_and_cluster(w.c1.to_points(), {}, cc1);
  const auto k2 = select_and_cluster(w.c2.to_points(), {}, cc2);
  const auto cm = build_cost_matrix(k1.centroids, k2.centroids);
  oracle::Matrix m(cm.size, std::vector<double>(cm.size));
  for (std::size_t i = 0; i < cm.size; ++i) {
    for (std::size_t j = 0; j < cm.size; ++j) m[i][j] = cm(i, j);
  }
  EXPECT_NEAR(r.matching->total_cost, oracle::min_assignment(m), 1e-9);
}

TEST(Methods, AgreeOnSharedPointMasses) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const std::size_t senses = 2 + rng() % 3;
    std::vector<std::size_t> a(senses), b(senses);
    for (std::size_t s = 0; s < senses; ++s) {
      a[s] = 4 + rng() % 40;
      b[s] = 4 + rng() % 40;
    }
    const auto c1 = point_masses("w", CorpusId::C1, a), c2 = point_masses("w", CorpusId::C2, b);
    const auto r1 = run_method1(c1, c2, config(Method::m1));
    const auto r2 = run_method2(c1, c2, config(Method::m2));
    EXPECT_EQ(count_pairs(r1.counts), count_pairs(r2.counts));
    EXPECT_EQ(r1.verdict.changed, r2.verdict.changed);
  }
}

TEST(Methods, DimensionMismatchAndEmptyCorpus) {
  const auto c1 = point_masses("w", CorpusId::C1, {5}, 4);
  const auto c2 = point_masses("w", CorpusId::C2, {5}, 3);
  EXPECT_THROW(run_method1(c1, c2, config(Method::m1)), StoreError);
  EXPECT_THROW(run_method2(c1, c2, config(Method::m2)), StoreError);
  const auto empty = point_masses("w", CorpusId::C2, {}, 4);
  EXPECT_THROW(run_method1(c1, empty, config(Method::m1)), std::invalid_argument);
}

namespace {

std::vector<WordResult> fake_results(const std::vector<std::pair<std::string, double>>& scores) {
  std::vector<WordResult> out;
  for (const auto& [w, v] : scores) {
    WordResult r;
    r.word = w;
    r.score.value = v;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Ranking, DescendingThenAlphabetical) {
  EXPECT_EQ(rank_by_score(fake_results({{"word2", 0.2}, {"word1", 0.7}})),
            (std::vector<std::string>{"word1", "word2"}));
  EXPECT_EQ(rank_by_score(fake_results({{"b", 0.5}, {"c", 0.5}, {"a", 0.5}, {"z", 0.9}})),
            (std::vector<std::string>{"z", "a", "b", "c"}));
}

TEST(CorpusPair, PerWordErrorsDoNotAbortBatch) {
  TempDir dir("pipe");
  auto words = synthetic::planted_benchmark(1);
  words.resize(3);
  Manifest m = synthetic::write_corpus(words, dir.path());
  testing_util::spit(dir / (words[1].word + ".C2.sste"), "garbage");
  const auto run = run_corpus_pair(m, config(Method::m1));
  EXPECT_EQ(run.results.size(), 2u);
  ASSERT_EQ(run.errors.size(), 1u);
  EXPECT_EQ(run.errors[0].word, words[1].word);
  EXPECT_EQ(run.ranking.size(), 2u);
}

TEST(CorpusPair, IndependentOfEntryOrderAndJobs) {
  TempDir dir("pipe");
  auto words = synthetic::planted_benchmark(2);
  words.resize(8);
  Manifest m = synthetic::write_corpus(words, dir.path());
  const auto base = run_corpus_pair(m, config(Method::m2), 1);

  Manifest shuffled = m;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
  const auto other = run_corpus_pair(shuffled, config(Method::m2), 4);

  ASSERT_EQ(base.results.size(), other.results.size());
  EXPECT_EQ(base.ranking, other.ranking);
  for (std::size_t i = 0; i < base.results.size(); ++i) {
    EXPECT_EQ(base.results[i].word, other.results[i].word);
    EXPECT_EQ(base.results[i].counts, other.results[i].counts);
    EXPECT_EQ(base.results[i].score.value, other.results[i].score.value);
    EXPECT_EQ(base.results[i].verdict.changed, other.results[i].verdict.changed);
  }
}
