#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ransd/common/labels.hpp"
#include "ransd/dynamic/report.hpp"

namespace ransd::dynamic {

/// Token categories, in vocabulary order.
enum class Category { Api = 0, Registry, File, Directory, Extension, Drop, Dll, String };
inline constexpr std::size_t kCategoryCount = 8;
std::string_view to_string(Category c);
Category parse_category(std::string_view text);

struct Token {
  Category category;
  std::string text;

  auto operator<=>(const Token&) const = default;
};

/// Distinct (category, token) pairs present in a report.
/// Registry and file tokens carry their operation kind as `kind:path`; network domains
/// are string tokens prefixed `domain:`; extensions come from file-operation paths.
std::vector<Token> report_tokens(const BehaviorReport& report);

class TokenVocabulary {
 public:
  TokenVocabulary() = default;
  /// Keeps tokens seen in at least `min_df` reports. Throws EmptyCorpus on no reports.
  static TokenVocabulary build(std::span<const BehaviorReport> reports, std::size_t min_df = 1);
  static TokenVocabulary from_entries(std::vector<Token> entries);

  std::size_t size() const { return entries_.size(); }
  const Token& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<Token>& entries() const { return entries_; }
  std::optional<std::size_t> index_of(const Token& token) const;
  std::array<std::size_t, kCategoryCount> category_counts() const;

  /// Display name used in reports: `category:token`.
  std::string feature_name(std::size_t i) const;

  /// `category<TAB>token` per line, line number = index.
  std::string to_text() const;
  static TokenVocabulary from_text(std::string_view text);

 private:
  std::vector<Token> entries_;
  std::map<Token, std::size_t> index_;
};

struct SparseFeatureVector {
  std::size_t dimension = 0;
  std::vector<std::size_t> active;  // strictly increasing, < dimension
  std::optional<Label> label;

  bool contains(std::size_t i) const;
};

/// Binary presence encoding; out-of-vocabulary tokens are ignored.
SparseFeatureVector vectorize(const BehaviorReport& report, const TokenVocabulary& vocab);

/// Tokens behind the active indices.
std::vector<Token> decode(const SparseFeatureVector& v, const TokenVocabulary& vocab);

}  // namespace ransd::dynamic
