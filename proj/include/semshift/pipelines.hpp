#pragma once

// Per-word change detection procedures and the batch driver.
//
// Method 1 clusters the union of both corpora's vectors and reads sense counts
// off the joint clusters. Method 2 clusters each corpus on its own, matches the
// clusters by centroid distance (dummy-padded), and merges matched pairs into
// shared senses while unmatched clusters become single-corpus senses. Both then
// feed the same counts to the decision rule and the graded measure.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "assignment.hpp"
#include "cluster_engine.hpp"
#include "embedding_store.hpp"
#include "shift_measures.hpp"

namespace semshift {

enum class Method { m1, m2 };

inline const char* to_string(Method m) { return m == Method::m1 ? "m1" : "m2"; }

struct PipelineConfig {
  Method method = Method::m1;
  ShiftMeasure s2_measure = ShiftMeasure::sj_distance;
  ClusterConfig cluster;  // cluster.seed is the global seed; words derive their own
  DecisionThresholds thresholds;
  double sigma = 1.0;

  void validate() const {
    cluster.validate();
    thresholds.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  }
};

struct MatchingSummary {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (C1 cluster, C2 cluster); indices >= m1/m2 are dummies
  std::vector<std::size_t> pure_in_c1;
  std::vector<std::size_t> pure_in_c2;
  double total_cost = 0.0;
};

struct WordResult {
  std::string word;
  Method method = Method::m1;
  SenseCounts counts;
  ChangeVerdict verdict;
  ShiftScore score;
  std::optional<MatchingSummary> matching;  // Method 2 only
  std::vector<std::size_t> senses_c1;       // sense index of each C1 occurrence
  std::vector<std::size_t> senses_c2;

  std::size_t m() const noexcept { return counts.m(); }
};

struct WordError {
  std::string word;
  std::string message;
};

inline std::uint64_t word_seed(std::uint64_t global_seed, const std::string& word) {
  return derive_seed(global_seed, word);
}

namespace detail {

inline void check_pair(const EmbeddingSet& c1, const EmbeddingSet& c2) {
  if (c1.dim != c2.dim) {
    throw StoreError(StoreError::Kind::dim_mismatch, "word '" + c1.word + "': corpus dims differ (" +
                                                         std::to_string(c1.dim) + " vs " +
                                                         std::to_string(c2.dim) + ")");
  }
  if (c1.count() == 0 || c2.count() == 0) {
    throw std::invalid_argument("word '" + c1.word + "' has no occurrences in " +
                                (c1.count() == 0 ? std::string("C1") : std::string("C2")));
  }
}

inline void finish(WordResult& r, const PipelineConfig& config) {
  r.verdict = decide_change(r.counts, config.thresholds);
  r.verdict.word = r.word;
  r.score = shift_score(r.word, r.counts, config.s2_measure, config.sigma);
}

}  // namespace detail

inline WordResult run_method1(const EmbeddingSet& c1, const EmbeddingSet& c2, const PipelineConfig& config) {
  config.validate();
  detail::check_pair(c1, c2);
  const std::size_t n1 = c1.count(), n2 = c2.count();

  std::vector<double> joint;
  joint.reserve((n1 + n2) * c1.dim);
  joint.insert(joint.end(), c1.values.begin(), c1.values.end());
  joint.insert(joint.end(), c2.values.begin(), c2.values.end());
  const Points points(c1.dim, std::move(joint));
  std::vector<int> tags(n1 + n2, 0);
  std::fill(tags.begin() + static_cast<std::ptrdiff_t>(n1), tags.end(), 1);

  ClusterConfig cc = config.cluster;
  cc.seed = word_seed(config.cluster.seed, c1.word);
  const Clustering clustering = select_and_cluster(points, tags, cc);

  WordResult r;
  r.word = c1.word;
  r.method = Method::m1;
  for (const auto& occ : clustering.occupancy) {
    r.counts.c1.push_back(occ[0]);
    r.counts.c2.push_back(occ[1]);
  }
  r.counts.validate();
  r.senses_c1.assign(clustering.assignments.begin(), clustering.assignments.begin() + static_cast<std::ptrdiff_t>(n1));
  r.senses_c2.assign(clustering.assignments.begin() + static_cast<std::ptrdiff_t>(n1), clustering.assignments.end());
  detail::finish(r, config);
  return r;
}

inline WordResult run_method2(const EmbeddingSet& c1, const EmbeddingSet& c2, const PipelineConfig& config) {
  config.validate();
  detail::check_pair(c1, c2);

  const std::uint64_t seed = word_seed(config.cluster.seed, c1.word);
  ClusterConfig cc1 = config.cluster, cc2 = config.cluster;
  cc1.seed = derive_seed(seed, "C1");
  cc2.seed = derive_seed(seed, "C2");
  const Clustering k1 = select_and_cluster(c1.to_points(), {}, cc1);
  const Clustering k2 = select_and_cluster(c2.to_points(), {}, cc2);

  const Matching matching = hungarian(build_cost_matrix(k1.centroids, k2.centroids));

  WordResult r;
  r.word = c1.word;
  r.method = Method::m2;
  // Sense s is the s-th matched (row, col) pair; a dummy side contributes 0.
  std::vector<std::size_t> sense_of_c1(k1.m), sense_of_c2(k2.m);
  for (std::size_t s = 0; s < matching.pairs.size(); ++s) {
    const auto [row, col] = matching.pairs[s];
    r.counts.c1.push_back(row < k1.m ? k1.occupancy[row][0] : 0);
    r.counts.c2.push_back(col < k2.m ? k2.occupancy[col][0] : 0);
    if (row < k1.m) sense_of_c1[row] = s;
    if (col < k2.m) sense_of_c2[col] = s;
  }
  r.counts.validate();
  for (auto a : k1.assignments) r.senses_c1.push_back(sense_of_c1[a]);
  for (auto a : k2.assignments) r.senses_c2.push_back(sense_of_c2[a]);

  MatchingSummary summary;
  summary.m1 = k1.m;
  summary.m2 = k2.m;
  summary.pairs = matching.pairs;
  summary.pure_in_c1 = matching.pure_in_c1;
  summary.pure_in_c2 = matching.pure_in_c2;
  summary.total_cost = matching.total_cost;
  r.matching = std::move(summary);
  detail::finish(r, config);
  return r;
}

inline WordResult run_word(const EmbeddingSet& c1, const EmbeddingSet& c2, const PipelineConfig& config) {
  return config.method == Method::m1 ? run_method1(c1, c2, config) : run_method2(c1, c2, config);
}

struct CorpusRun {
  std::vector<WordResult> results;  // sorted by word
  std::vector<WordError> errors;    // sorted by word
  std::vector<std::string> ranking; // by descending score, ties alphabetical

  const WordResult* find(const std::string& word) const {
    for (const auto& r : results) {
      if (r.word == word) return &r;
    }
    return nullptr;
  }
};

/// Orders words by descending score; equal scores fall back to the word.
inline std::vector<std::string> rank_by_score(const std::vector<WordResult>& results) {
  std::vector<const WordResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const WordResult* a, const WordResult* b) {
    if (a->score.value != b->score.value) return a->score.value > b->score.value;
    return a->word < b->word;
  });
  std::vector<std::string> out;
  for (const auto* r : order) out.push_back(r->word);
  return out;
}

/// Runs the configured method over every target word. Words are independent
/// and may be spread over `jobs` threads; results do not depend on `jobs`.
/// A failing word is recorded in `errors` and does not stop the batch.
inline CorpusRun run_corpus_pair(const Manifest& manifest, const PipelineConfig& config, unsigned jobs = 1) {
  config.validate();
  const std::vector<std::string> words = manifest.words();
  std::vector<std::optional<WordResult>> results(words.size());
  std::vector<std::optional<std::string>> failures(words.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < words.size(); i = next++) {
      try {
        auto [c1, c2] = load_word_pair(manifest, words[i]);
        results[i] = run_word(c1, c2, config);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(words.size(), 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  CorpusRun run;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (results[i]) run.results.push_back(std::move(*results[i]));
    if (failures[i]) run.errors.push_back({words[i], *failures[i]});
  }
  run.ranking = rank_by_score(run.results);
  return run;
}

}  // namespace semshift
