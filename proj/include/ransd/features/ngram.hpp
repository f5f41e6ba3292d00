#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ransd/dynamic/report.hpp"

namespace ransd::features {

using NGram = std::vector<std::string>;

/// Contiguous n-grams in order of occurrence; max(0, L - n + 1) of them. Throws InvalidN for n < 1.
std::vector<NGram> extract_ngrams(std::span<const std::string> sequence, int n);

struct NGramTable {
  int n = 0;
  std::map<NGram, std::size_t> counts;
  std::set<NGram> repeated;  // seen at least twice inside a single sequence

  std::size_t total() const;
};

NGramTable build_ngram_table(const std::vector<std::vector<std::string>>& sequences, int n);

struct ClassNGramComparison {
  int n = 0;
  NGramTable malicious;
  NGramTable benign;
  std::set<NGram> intersection;
};

struct NGramAnalysis {
  dynamic::OpKind kind = dynamic::OpKind::Delete;
  std::vector<ClassNGramComparison> per_n;

  bool intersections_empty() const;
};

/// Per-class n-gram tables over the registry sequences of `kind`. Unlabelled reports are
/// skipped. Throws SingleClass.
NGramAnalysis class_ngram_report(std::span<const dynamic::BehaviorReport> reports,
                                 dynamic::OpKind kind, std::span<const int> n_values);

std::string ngram_report_json(const NGramAnalysis& analysis);
std::string ngram_summary_text(const NGramAnalysis& analysis);

/// P(b occurs in a report | a occurs) over registry keys of `kind`.
struct CooccurrenceMatrix {
  std::vector<std::string> tokens;
  std::vector<std::optional<double>> probability;  // row a, column b

  std::optional<double> at(std::size_t a, std::size_t b) const {
    return probability[a * tokens.size() + b];
  }
};

/// Rows and columns are every key observed under `kind`, sorted.
CooccurrenceMatrix cooccurrence_probability(std::span<const dynamic::BehaviorReport> reports,
                                            dynamic::OpKind kind);
/// Explicit token list; rows for tokens that never occur are absent (nullopt).
CooccurrenceMatrix cooccurrence_probability(std::span<const dynamic::BehaviorReport> reports,
                                            dynamic::OpKind kind, std::vector<std::string> tokens);

}  // namespace ransd::features
