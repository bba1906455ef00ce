#pragma once

// Planted-sense embedding generator. Each sense is an isotropic Gaussian; the
// sense centers sit on scaled coordinate axes so every pair of centers is
// exactly `separation` apart.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "embedding_store.hpp"
#include "points.hpp"
#include "shift_measures.hpp"

namespace semshift::synthetic {

struct SenseLayout {
  std::uint32_t dim = 8;
  double separation = 20.0;
  double spread = 1.0;
};

/// Standard normal via Box-Muller on the portable uniform01.
template <class Engine>
double standard_normal(Engine& engine) {
  double u1 = uniform01(engine);
  while (u1 <= 0.0) u1 = uniform01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::vector<double> sense_center(const SenseLayout& layout, std::size_t sense) {
  if (sense >= layout.dim) throw std::invalid_argument("sense index must be below dim");
  std::vector<double> c(layout.dim, 0.0);
  c[sense] = layout.separation / std::numbers::sqrt2;
  return c;
}

/// `per_sense[s]` occurrences drawn around sense s, in sense order.
template <class Engine>
EmbeddingSet sample_set(const std::string& word, CorpusId corpus, const std::vector<std::uint64_t>& per_sense,
                        const SenseLayout& layout, Engine& engine) {
  EmbeddingSet set;
  set.word = word;
  set.corpus = corpus;
  set.dim = layout.dim;
  std::vector<float> v(layout.dim);
  for (std::size_t s = 0; s < per_sense.size(); ++s) {
    const auto center = sense_center(layout, s);
    for (std::uint64_t i = 0; i < per_sense[s]; ++i) {
      for (std::size_t j = 0; j < layout.dim; ++j) {
        v[j] = static_cast<float>(center[j] + layout.spread * standard_normal(engine));
      }
      set.add(v);
    }
  }
  return set;
}

struct PlantedWord {
  std::string word;
  SenseCounts planted;  // true per-sense occurrence counts
  EmbeddingSet c1;
  EmbeddingSet c2;
  bool changed = false;
  double graded = 0.0;  // total-variation distance of the planted proportions
};

inline PlantedWord make_word(const std::string& word, const SenseCounts& planted, bool changed,
                             const SenseLayout& layout, std::uint64_t seed) {
  std::mt19937_64 engine(derive_seed(seed, word));
  PlantedWord w;
  w.word = word;
  w.planted = planted;
  w.changed = changed;
  w.graded = change_coefficient(planted);
  w.c1 = sample_set(word, CorpusId::C1, planted.c1, layout, engine);
  w.c2 = sample_set(word, CorpusId::C2, planted.c2, layout, engine);
  return w;
}

/// 20 words: the first ten gain a sense (30 + 10 i new-corpus occurrences,
/// i % 3 old-corpus stragglers), the last ten are stable. Words alternate
/// between two and three shared base senses with 100 occurrences per corpus
/// spread over them.
inline std::vector<PlantedWord> planted_benchmark(std::uint64_t seed, const SenseLayout& layout = {}) {
  std::vector<PlantedWord> words;
  for (std::size_t i = 0; i < 20; ++i) {
    const bool shifted = i < 10;
    const std::size_t base = 2 + i % 2;
    std::vector<std::uint64_t> c1(base, 100 / base), c2(base, 100 / base);
    if (shifted) {
      c1.push_back(i % 3);
      c2.push_back(30 + 10 * i);
    }
    char name[16];
    std::snprintf(name, sizeof name, "%s%02zu", shifted ? "shift" : "stable", i);
    words.push_back(make_word(name, SenseCounts(c1, c2), shifted, layout, seed));
  }
  return words;
}

/// Writes payloads and a manifest for `words` into `dir`.
inline Manifest write_corpus(const std::vector<PlantedWord>& words, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Manifest manifest;
  manifest.base_dir = dir;
  for (const auto& w : words) {
    add_to_manifest(manifest, w.c1, w.word + ".C1.sste");
    add_to_manifest(manifest, w.c2, w.word + ".C2.sste");
  }
  write_manifest(manifest, dir / "manifest.json");
  return manifest;
}

}  // namespace semshift::synthetic
