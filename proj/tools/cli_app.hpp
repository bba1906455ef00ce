#pragma once

// semshift command line: detect / rank / eval / inspect / synth.

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semshift/semshift.hpp"

namespace semshift::cli {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct PipelineFlags {
  std::string method = "m1";
  std::string measure = "jsd";
  std::size_t k_max = 10;
  std::size_t restarts = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  std::uint64_t lower_bound = 5;
  std::uint64_t upper_bound = 2;
  bool strict_zero = false;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void add_to(CLI::App& app) {
    app.add_option("--method", method, "Clustering method: m1 (joint) or m2 (separate + matching)")
        ->check(CLI::IsMember({"m1", "m2"}))
        ->capture_default_str();
    app.add_option("--measure", measure, "Graded measure: jsd (symmetrized KL) or coefficient")
        ->check(CLI::IsMember({"jsd", "coefficient"}))
        ->capture_default_str();
    app.add_option("--k-max", k_max, "Largest number of clusters tried")->check(CLI::Range(2, 1000))->capture_default_str();
    app.add_option("--restarts", restarts, "Seeded initializations per k")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--max-iters", max_iters, "Lloyd iterations per run")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tol", tol, "Relative inertia convergence threshold")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--lower-bound", lower_bound, "Minimum cluster size for a gained/lost sense")->capture_default_str();
    app.add_option("--upper-bound", upper_bound, "Maximum size of the absent side of a gained/lost sense")->capture_default_str();
    app.add_flag("--strict-zero", strict_zero, "Changed iff some cluster is empty in one corpus");
    app.add_option("--sigma", sigma, "Equivalent sample size of the smoothing prior")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", seed, "Global random seed")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads (word-level)")->check(CLI::PositiveNumber)->capture_default_str();
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.method = method == "m2" ? Method::m2 : Method::m1;
    c.s2_measure = measure == "coefficient" ? ShiftMeasure::coefficient : ShiftMeasure::sj_distance;
    c.cluster.k_max = k_max;
    c.cluster.n_restarts = restarts;
    c.cluster.max_iters = max_iters;
    c.cluster.tol = tol;
    c.cluster.seed = seed;
    c.thresholds.lower_bound = lower_bound;
    c.thresholds.upper_bound = upper_bound;
    c.thresholds.strict_zero = strict_zero;
    c.sigma = sigma;
    return c;
  }

  nlohmann::json echo() const {
    return {{"method", method},           {"measure", measure},         {"k_max", k_max},
            {"restarts", restarts},       {"max_iters", max_iters},     {"tol", tol},
            {"lower_bound", lower_bound}, {"upper_bound", upper_bound}, {"strict_zero", strict_zero},
            {"sigma", sigma},             {"seed", seed}};
  }
};

inline nlohmann::json word_record(const WordResult& r) {
  nlohmann::json occupancy = nlohmann::json::array();
  for (std::size_t k = 0; k < r.m(); ++k) occupancy.push_back({r.counts.c1[k], r.counts.c2[k]});
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : r.verdict.witnesses) {
    witnesses.push_back({{"cluster", w.cluster}, {"direction", to_string(w.direction)}, {"n1", w.n1}, {"n2", w.n2}});
  }
  nlohmann::json j = {{"word", r.word},
                      {"changed", r.verdict.changed},
                      {"witnesses", std::move(witnesses)},
                      {"score", r.score.value},
                      {"measure", to_string(r.score.measure)},
                      {"m", r.m()},
                      {"occupancy", std::move(occupancy)}};
  if (r.matching) {
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [a, b] : r.matching->pairs) pairs.push_back({a, b});
    j["matching"] = {{"m1", r.matching->m1},
                     {"m2", r.matching->m2},
                     {"pairs", std::move(pairs)},
                     {"pure_in_c1", r.matching->pure_in_c1},
                     {"pure_in_c2", r.matching->pure_in_c2},
                     {"total_cost", r.matching->total_cost}};
  }
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

enum class Subtask { detect, rank };

inline int run_batch(Subtask task, const std::string& manifest_path, const std::string& answers_path,
                     const std::string& report_path, const PipelineFlags& flags, bool report_timing,
                     std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Manifest manifest = read_manifest(manifest_path);
  if (manifest.entries.empty()) throw std::runtime_error(manifest_path + ": manifest has no target words");

  const CorpusRun run = run_corpus_pair(manifest, flags.config(), flags.jobs);
  for (const auto& e : run.errors) err << "warning: " << e.word << ": " << e.message << '\n';
  if (run.results.empty()) throw std::runtime_error("no target word could be processed");

  std::string answers;
  if (task == Subtask::detect) {
    for (const auto& r : run.results) answers += r.word + '\t' + (r.verdict.changed ? "1" : "0") + '\n';
  } else {
    for (const auto& w : run.ranking) answers += w + '\t' + format_double(run.find(w)->score.value) + '\n';
  }
  write_text(answers_path, answers);

  if (!report_path.empty()) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& r : run.results) words.push_back(word_record(r));
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& e : run.errors) errors.push_back({{"word", e.word}, {"error", e.message}});
    nlohmann::json report = {{"subtask", task == Subtask::detect ? "detect" : "rank"},
                             {"manifest", manifest_path},
                             {"config", flags.echo()},
                             {"words", std::move(words)},
                             {"errors", std::move(errors)},
                             {"ranking", run.ranking}};
    if (report_timing) {
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      report["timing"] = {{"seconds", elapsed}, {"jobs", flags.jobs}};
    }
    write_text(report_path, report.dump(2) + '\n');
  }
  return 0;
}

inline int run_eval(const std::string& answers_path, const std::string& gold_path, int subtask, std::ostream& out,
                    std::ostream& err) {
  const auto answers = read_word_values(answers_path);
  const auto gold = read_word_values(gold_path);
  for (const auto& w : missing_from(answers, gold)) err << "warning: gold word '" << w << "' has no answer\n";
  if (subtask == 1) {
    out << "accuracy=" << format_double(accuracy(to_binary(answers, answers_path), to_binary(gold, gold_path))) << '\n';
  } else {
    out << "spearman=" << format_double(spearman(answers, gold)) << '\n';
  }
  return 0;
}

inline int run_inspect(const std::string& manifest_path, const std::string& word, const std::string& out_path,
                       const PipelineFlags& flags) {
  const Manifest manifest = read_manifest(manifest_path);
  const auto [c1, c2] = load_word_pair(manifest, word);
  const WordResult r = run_word(c1, c2, flags.config());

  std::vector<double> joint(c1.values.begin(), c1.values.end());
  joint.insert(joint.end(), c2.values.begin(), c2.values.end());
  const auto coords = project_2d(Points(c1.dim, std::move(joint)));

  std::string text = "index\tcorpus\tcluster\tx\ty\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const bool first = i < c1.count();
    const std::size_t idx = first ? i : i - c1.count();
    const std::size_t cluster = first ? r.senses_c1[idx] : r.senses_c2[idx];
    text += std::to_string(idx) + '\t' + (first ? "C1" : "C2") + '\t' + std::to_string(cluster) + '\t' +
            format_double(coords[i][0]) + '\t' + format_double(coords[i][1]) + '\n';
  }
  write_text(out_path, text);
  return 0;
}

inline int run_synth(const std::string& dir, std::uint64_t seed, std::ostream& out) {
  const auto words = synthetic::planted_benchmark(seed);
  synthetic::write_corpus(words, dir);
  std::string s1, s2;
  for (const auto& w : words) {
    s1 += w.word + '\t' + (w.changed ? "1" : "0") + '\n';
    s2 += w.word + '\t' + format_double(w.graded) + '\n';
  }
  const std::filesystem::path root(dir);
  write_text(root / "gold_s1.txt", s1);
  write_text(root / "gold_s2.txt", s2);
  out << "wrote " << words.size() << " words to " << (root / "manifest.json").string() << '\n';
  return 0;
}

/// Entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Lexical semantic change detection by clustering occurrence embeddings"};
  app.require_subcommand(1);

  PipelineFlags detect_flags, rank_flags, inspect_flags;
  std::string manifest, answers, report, gold, word, out_path, synth_dir;
  bool timing = false;
  int subtask = 1;
  std::uint64_t synth_seed = 0;

  auto* detect = app.add_subcommand("detect", "Binary change decision per target word");
  detect->add_option("manifest", manifest, "Embedding manifest (JSON)")->required();
  detect->add_option("-o,--answers", answers, "Answer file to write (word<TAB>0|1)")->required();
  detect->add_option("--report", report, "JSON run report to write");
  detect->add_flag("--report-timing", timing, "Include wall-clock timing in the report");
  detect_flags.add_to(*detect);

  auto* rank = app.add_subcommand("rank", "Graded change score per target word, sorted descending");
  rank->add_option("manifest", manifest, "Embedding manifest (JSON)")->required();
  rank->add_option("-o,--answers", answers, "Answer file to write (word<TAB>score)")->required();
  rank->add_option("--report", report, "JSON run report to write");
  rank->add_flag("--report-timing", timing, "Include wall-clock timing in the report");
  rank_flags.add_to(*rank);

  auto* eval = app.add_subcommand("eval", "Score an answer file against gold labels");
  eval->add_option("answers", answers, "Answer file")->required();
  eval->add_option("gold", gold, "Gold file")->required();
  eval->add_option("--subtask", subtask, "1 = accuracy, 2 = Spearman")->check(CLI::IsMember({1, 2}))->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Per-occurrence clusters and 2-D coordinates for one word");
  inspect->add_option("manifest", manifest, "Embedding manifest (JSON)")->required();
  inspect->add_option("word", word, "Target word")->required();
  inspect->add_option("-o,--out", out_path, "TSV file to write")->required();
  inspect_flags.add_to(*inspect);

  auto* synth = app.add_subcommand("synth", "Write a planted-sense synthetic corpus with gold files");
  synth->add_option("dir", synth_dir, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*detect) return run_batch(Subtask::detect, manifest, answers, report, detect_flags, timing, err);
    if (*rank) return run_batch(Subtask::rank, manifest, answers, report, rank_flags, timing, err);
    if (*eval) return run_eval(answers, gold, subtask, out, err);
    if (*inspect) return run_inspect(manifest, word, out_path, inspect_flags);
    if (*synth) return run_synth(synth_dir, synth_seed, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace semshift::cli
