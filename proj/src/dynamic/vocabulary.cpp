#include "ransd/dynamic/vocabulary.hpp"

#include <algorithm>
#include <set>

#include "ransd/common/error.hpp"
#include "ransd/dynamic/normalize.hpp"

namespace ransd::dynamic {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Api: return "api";
    case Category::Registry: return "registry";
    case Category::File: return "file";
    case Category::Directory: return "directory";
    case Category::Extension: return "extension";
    case Category::Drop: return "drop";
    case Category::Dll: return "dll";
    case Category::String: return "string";
  }
  return "?";
}

Category parse_category(std::string_view text) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    const auto c = static_cast<Category>(i);
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorKind::Format, "unknown token category '" + std::string(text) + "'");
}

std::vector<Token> report_tokens(const BehaviorReport& r) {
  std::set<Token> tokens;
  auto add = [&](Category c, const std::string& text) {
    if (!text.empty()) tokens.insert(Token{c, text});
  };
  for (const auto& t : r.api_calls) add(Category::Api, t);
  for (OpKind k : kOpKinds) {
    const std::string prefix = std::string(to_string(k)) + ":";
    for (const auto& key : r.registry(k)) add(Category::Registry, prefix + key);
    for (const auto& path : r.files(k)) {
      add(Category::File, prefix + path);
      add(Category::Extension, file_extension(path));
    }
  }
  for (const auto& t : r.dirs_created) add(Category::Directory, t);
  for (const auto& t : r.drop_extensions) add(Category::Drop, t);
  for (const auto& t : r.dlls) add(Category::Dll, t);
  for (const auto& t : r.strings) add(Category::String, t);
  for (const auto& t : r.net_domains) add(Category::String, "domain:" + t);
  return {tokens.begin(), tokens.end()};
}

TokenVocabulary TokenVocabulary::build(std::span<const BehaviorReport> reports, std::size_t min_df) {
  if (reports.empty()) throw Error(ErrorKind::EmptyCorpus, "no reports to build a vocabulary from");
  std::map<Token, std::size_t> df;
  for (const auto& r : reports)
    for (auto& t : report_tokens(r)) ++df[std::move(t)];
  std::vector<Token> kept;
  for (const auto& [token, count] : df)
    if (count >= min_df) kept.push_back(token);
  // std::map order is (category, text), which is the vocabulary order.
  return from_entries(std::move(kept));
}

TokenVocabulary TokenVocabulary::from_entries(std::vector<Token> entries) {
  TokenVocabulary v;
  v.entries_ = std::move(entries);
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    if (!v.index_.emplace(v.entries_[i], i).second)
      throw Error(ErrorKind::Format, "duplicate vocabulary entry " + v.feature_name(i));
  }
  return v;
}

std::optional<std::size_t> TokenVocabulary::index_of(const Token& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::array<std::size_t, kCategoryCount> TokenVocabulary::category_counts() const {
  std::array<std::size_t, kCategoryCount> counts{};
  for (const auto& e : entries_) ++counts[static_cast<std::size_t>(e.category)];
  return counts;
}

std::string TokenVocabulary::feature_name(std::size_t i) const {
  const auto& e = entries_.at(i);
  return std::string(to_string(e.category)) + ":" + e.text;
}

std::string TokenVocabulary::to_text() const {
  std::string out;
  for (const auto& e : entries_) {
    out += to_string(e.category);
    out += '\t';
    out += e.text;
    out += '\n';
  }
  return out;
}

TokenVocabulary TokenVocabulary::from_text(std::string_view text) {
  std::vector<Token> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw Error(ErrorKind::Format, "vocabulary line without tab");
    entries.push_back({parse_category(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  return from_entries(std::move(entries));
}

bool SparseFeatureVector::contains(std::size_t i) const {
  return std::binary_search(active.begin(), active.end(), i);
}

SparseFeatureVector vectorize(const BehaviorReport& report, const TokenVocabulary& vocab) {
  SparseFeatureVector v;
  v.dimension = vocab.size();
  v.label = report.label;
  for (const auto& t : report_tokens(report))
    if (auto idx = vocab.index_of(t)) v.active.push_back(*idx);
  std::sort(v.active.begin(), v.active.end());
  return v;
}

std::vector<Token> decode(const SparseFeatureVector& v, const TokenVocabulary& vocab) {
  std::vector<Token> out;
  out.reserve(v.active.size());
  for (std::size_t i : v.active) out.push_back(vocab.entry(i));
  return out;
}

}  // namespace ransd::dynamic
