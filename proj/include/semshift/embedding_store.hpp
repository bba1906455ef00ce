#pragma once

// On-disk interchange for per-word, per-corpus occurrence embeddings.
//
// Payload file layout (all integers little-endian uint32):
//   bytes 0..3   magic "SSTE"
//   bytes 4..7   format_version
//   bytes 8..11  dim
//   bytes 12..15 count
//   then count*dim little-endian IEEE-754 float32, row-major by occurrence.
//
// A JSON manifest lists the payload files:
//   {"format_version": 1,
//    "entries": [{"word": w, "corpus": "C1"|"C2", "path": p, "count": n, "dim": d}, ...]}
// Relative paths are resolved against the manifest's directory.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "points.hpp"

namespace semshift {

inline constexpr std::array<char, 4> kEmbeddingMagic = {'S', 'S', 'T', 'E'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 16;

enum class CorpusId { C1 = 0, C2 = 1 };

inline const char* to_string(CorpusId c) { return c == CorpusId::C1 ? "C1" : "C2"; }

class StoreError : public std::runtime_error {
 public:
  enum class Kind {
    io,
    bad_magic,
    unsupported_version,
    truncated,
    trailing_bytes,
    non_finite,
    invariant,
    manifest,
    missing_word,
    dim_mismatch,
  };

  StoreError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline CorpusId parse_corpus_id(const std::string& s) {
  if (s == "C1") return CorpusId::C1;
  if (s == "C2") return CorpusId::C2;
  throw StoreError(StoreError::Kind::manifest, "unknown corpus id '" + s + "' (expected C1 or C2)");
}

/// All occurrence vectors of one target word in one corpus, stored as float32.
struct EmbeddingSet {
  std::string word;
  CorpusId corpus = CorpusId::C1;
  std::uint32_t dim = 0;
  std::vector<float> values;  // count * dim, row-major

  std::size_t count() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> vector(std::size_t i) const noexcept {
    return {values.data() + i * dim, dim};
  }

  void add(std::span<const float> v) {
    if (v.size() != dim) {
      throw StoreError(StoreError::Kind::invariant, "vector has " + std::to_string(v.size()) +
                                                        " components, expected " +
                                                        std::to_string(dim));
    }
    values.insert(values.end(), v.begin(), v.end());
  }

  /// Promotes to float64 for downstream math.
  Points to_points() const {
    return Points(dim, std::vector<double>(values.begin(), values.end()));
  }

  bool operator==(const EmbeddingSet&) const = default;
};

inline void validate(const EmbeddingSet& set) {
  if (set.dim == 0) throw StoreError(StoreError::Kind::invariant, "dim must be positive");
  if (set.values.size() % set.dim != 0) {
    throw StoreError(StoreError::Kind::invariant, "value count is not a multiple of dim");
  }
  if (set.count() > UINT32_MAX) {
    throw StoreError(StoreError::Kind::invariant, "too many vectors for the file format");
  }
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    if (!std::isfinite(set.values[i])) {
      throw StoreError(StoreError::Kind::invariant,
                       "non-finite component at vector " + std::to_string(i / set.dim) +
                           ", index " + std::to_string(i % set.dim));
    }
  }
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// Serializes a validated set to the payload byte layout.
inline std::string encode_embedding_set(const EmbeddingSet& set) {
  validate(set);
  std::string out;
  out.reserve(kHeaderBytes + set.values.size() * 4);
  out.append(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  detail::put_u32(out, kFormatVersion);
  detail::put_u32(out, set.dim);
  detail::put_u32(out, static_cast<std::uint32_t>(set.count()));
  for (float f : set.values) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

/// Parses payload bytes. Word and corpus are left default; callers reading
/// through a manifest fill them from the entry.
inline EmbeddingSet decode_embedding_set(std::span<const unsigned char> bytes) {
  using K = StoreError::Kind;
  if (bytes.size() < 4 || !std::equal(kEmbeddingMagic.begin(), kEmbeddingMagic.end(), bytes.begin(),
                                      [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw StoreError(K::bad_magic, "missing SSTE magic");
  }
  if (bytes.size() < kHeaderBytes) throw StoreError(K::truncated, "header truncated");
  const std::uint32_t version = detail::get_u32(bytes.data() + 4);
  if (version != kFormatVersion) {
    throw StoreError(K::unsupported_version, "unsupported format version " + std::to_string(version));
  }
  EmbeddingSet set;
  set.dim = detail::get_u32(bytes.data() + 8);
  const std::uint64_t count = detail::get_u32(bytes.data() + 12);
  if (set.dim == 0) throw StoreError(K::invariant, "header declares dim 0");
  const std::uint64_t expected = kHeaderBytes + count * set.dim * 4ULL;
  if (bytes.size() < expected) {
    throw StoreError(K::truncated, "payload truncated: expected " + std::to_string(expected) +
                                       " bytes, found " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw StoreError(K::trailing_bytes, "payload has " + std::to_string(bytes.size() - expected) +
                                            " unexpected trailing bytes");
  }
  set.values.resize(count * set.dim);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < set.values.size(); ++i, p += 4) {
    const float f = std::bit_cast<float>(detail::get_u32(p));
    if (!std::isfinite(f)) {
      throw StoreError(K::non_finite, "non-finite component at vector " +
                                          std::to_string(i / set.dim) + ", index " +
                                          std::to_string(i % set.dim));
    }
    set.values[i] = f;
  }
  return set;
}

inline void write_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path) {
  const std::string bytes = encode_embedding_set(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError(StoreError::Kind::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StoreError(StoreError::Kind::io, "write failed for " + path.string());
}

inline EmbeddingSet read_embedding_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError(StoreError::Kind::io, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_embedding_set(bytes);
  } catch (const StoreError& e) {
    throw StoreError(e.kind(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string word;
  CorpusId corpus = CorpusId::C1;
  std::string path;
  std::uint32_t count = 0;
  std::uint32_t dim = 0;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::uint32_t format_version = kFormatVersion;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  // where relative entry paths resolve; not serialized

  const ManifestEntry* find(const std::string& word, CorpusId corpus) const {
    for (const auto& e : entries) {
      if (e.word == word && e.corpus == corpus) return &e;
    }
    return nullptr;
  }

  /// Distinct target words, sorted.
  std::vector<std::string> words() const {
    std::set<std::string> s;
    for (const auto& e : entries) s.insert(e.word);
    return {s.begin(), s.end()};
  }

  std::filesystem::path resolve(const ManifestEntry& e) const {
    std::filesystem::path p(e.path);
    return p.is_absolute() ? p : base_dir / p;
  }
};

/// Checks the uniqueness and both-corpora invariants.
inline void validate(const Manifest& manifest) {
  using K = StoreError::Kind;
  if (manifest.format_version != kFormatVersion) {
    throw StoreError(K::unsupported_version,
                     "unsupported manifest format_version " + std::to_string(manifest.format_version));
  }
  std::map<std::string, std::array<int, 2>> seen;
  for (const auto& e : manifest.entries) {
    if (e.word.empty()) throw StoreError(K::manifest, "manifest entry with empty word");
    auto& slot = seen[e.word][static_cast<int>(e.corpus)];
    if (++slot > 1) {
      throw StoreError(K::manifest, "duplicate manifest entry for '" + e.word + "' in " + to_string(e.corpus));
    }
  }
  for (const auto& [word, c] : seen) {
    if (c[0] == 0 || c[1] == 0) {
      throw StoreError(K::manifest, "target word '" + word + "' is not listed for both corpora");
    }
  }
}

inline nlohmann::json manifest_to_json(const Manifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"word", e.word},
                       {"corpus", to_string(e.corpus)},
                       {"path", e.path},
                       {"count", e.count},
                       {"dim", e.dim}});
  }
  return {{"format_version", manifest.format_version}, {"entries", std::move(entries)}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  using K = StoreError::Kind;
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<std::uint32_t>();
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.word = je.at("word").get<std::string>();
      e.corpus = parse_corpus_id(je.at("corpus").get<std::string>());
      e.path = je.at("path").get<std::string>();
      e.count = je.at("count").get<std::uint32_t>();
      e.dim = je.at("dim").get<std::uint32_t>();
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw StoreError(K::manifest, std::string("malformed manifest: ") + ex.what());
  }
  validate(m);
  return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StoreError(StoreError::Kind::io, "cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw StoreError(StoreError::Kind::manifest, path.string() + ": " + ex.what());
  }
  Manifest m = manifest_from_json(j);
  m.base_dir = path.parent_path();
  return m;
}

inline void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  validate(manifest);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StoreError(StoreError::Kind::io, "cannot open " + path.string() + " for writing");
  out << manifest_to_json(manifest).dump(2) << '\n';
  if (!out) throw StoreError(StoreError::Kind::io, "write failed for " + path.string());
}

/// Reads the payload an entry points to and checks it against the entry.
inline EmbeddingSet read_embedding_set(const Manifest& manifest, const ManifestEntry& entry) {
  EmbeddingSet set = read_embedding_set(manifest.resolve(entry));
  if (set.dim != entry.dim || set.count() != entry.count) {
    throw StoreError(StoreError::Kind::manifest,
                     "payload for '" + entry.word + "' " + to_string(entry.corpus) + " has count=" +
                         std::to_string(set.count()) + " dim=" + std::to_string(set.dim) +
                         " but manifest says count=" + std::to_string(entry.count) +
                         " dim=" + std::to_string(entry.dim));
  }
  set.word = entry.word;
  set.corpus = entry.corpus;
  return set;
}

inline std::pair<EmbeddingSet, EmbeddingSet> load_word_pair(const Manifest& manifest, const std::string& word) {
  using K = StoreError::Kind;
  const ManifestEntry* e1 = manifest.find(word, CorpusId::C1);
  const ManifestEntry* e2 = manifest.find(word, CorpusId::C2);
  if (e1 == nullptr || e2 == nullptr) {
    throw StoreError(K::missing_word, "word '" + word + "' missing from " +
                                          (e1 == nullptr ? std::string("C1") : std::string("C2")));
  }
  if (e1->dim != e2->dim) {
    throw StoreError(K::dim_mismatch, "word '" + word + "' has dim " + std::to_string(e1->dim) +
                                          " in C1 but " + std::to_string(e2->dim) + " in C2");
  }
  auto s1 = read_embedding_set(manifest, *e1);
  auto s2 = read_embedding_set(manifest, *e2);
  if (s1.dim != s2.dim) {
    throw StoreError(K::dim_mismatch, "word '" + word + "' payload dims differ");
  }
  return {std::move(s1), std::move(s2)};
}

/// Writes both sets and appends the matching entries to the manifest. The
/// payload path stored in the manifest is relative to `manifest.base_dir`.
inline void add_to_manifest(Manifest& manifest, const EmbeddingSet& set, const std::string& relative_path) {
  write_embedding_set(set, manifest.base_dir / relative_path);
  manifest.entries.push_back({set.word, set.corpus, relative_path,
                              static_cast<std::uint32_t>(set.count()), set.dim});
}

}  // namespace semshift
