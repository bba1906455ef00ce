#pragma once

// Accuracy and Spearman scoring against gold annotations, plus the
// two-column "word<TAB>value" answer/gold file grammar.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace semshift {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class V>
std::vector<std::string> overlap(const std::map<std::string, V>& a, const std::map<std::string, V>& b) {
  std::vector<std::string> out;
  for (const auto& [w, _] : a) {
    if (b.count(w)) out.push_back(w);
  }
  return out;
}

template <class V>
std::vector<std::string> missing_from(const std::map<std::string, V>& results, const std::map<std::string, V>& gold) {
  std::vector<std::string> out;
  for (const auto& [w, _] : gold) {
    if (!results.count(w)) out.push_back(w);
  }
  return out;
}

inline double accuracy(const std::map<std::string, bool>& verdicts, const std::map<std::string, bool>& gold) {
  const auto words = overlap(verdicts, gold);
  if (words.empty()) throw EvaluationError("accuracy: no words in common with gold");
  std::size_t hits = 0;
  for (const auto& w : words) hits += verdicts.at(w) == gold.at(w) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw EvaluationError("spearman: zero rank variance");
  return sxy / std::sqrt(sxx * syy);
}

/// Spearman's rho with averaged ranks for ties, over the words both maps share.
inline double spearman(const std::map<std::string, double>& scores, const std::map<std::string, double>& gold) {
  const auto words = overlap(scores, gold);
  if (words.size() < 2) throw EvaluationError("spearman: need at least 2 words in common with gold");
  std::vector<double> x, y;
  for (const auto& w : words) {
    x.push_back(scores.at(w));
    y.push_back(gold.at(w));
  }
  return pearson(average_ranks(x), average_ranks(y));
}

// ---------------------------------------------------------------------------
// word<TAB>value files

inline std::map<std::string, double> parse_word_values(std::istream& in, const std::string& source = "<input>") {
  std::map<std::string, double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw EvaluationError(source + ":" + std::to_string(lineno) + ": expected 'word<TAB>value'");
    }
    const std::string word = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(v)) {
      throw EvaluationError(source + ":" + std::to_string(lineno) + ": bad value '" + value + "'");
    }
    if (!out.emplace(word, v).second) {
      throw EvaluationError(source + ":" + std::to_string(lineno) + ": duplicate word '" + word + "'");
    }
  }
  return out;
}

inline std::map<std::string, double> read_word_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EvaluationError("cannot open " + path.string());
  return parse_word_values(in, path.string());
}

/// Binary labels; every value must be exactly 0 or 1.
inline std::map<std::string, bool> to_binary(const std::map<std::string, double>& values, const std::string& source) {
  std::map<std::string, bool> out;
  for (const auto& [w, v] : values) {
    if (v != 0.0 && v != 1.0) {
      throw EvaluationError(source + ": binary label for '" + w + "' must be 0 or 1");
    }
    out.emplace(w, v == 1.0);
  }
  return out;
}

}  // namespace semshift
