#include "ransd/features/ngram.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "ransd/common/error.hpp"

namespace ransd::features {

std::vector<NGram> extract_ngrams(std::span<const std::string> sequence, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidN, "n-gram order must be at least 1");
  const auto order = static_cast<std::size_t>(n);
  std::vector<NGram> out;
  if (sequence.size() < order) return out;
  out.reserve(sequence.size() - order + 1);
  for (std::size_t i = 0; i + order <= sequence.size(); ++i)
    out.emplace_back(sequence.begin() + static_cast<std::ptrdiff_t>(i),
                     sequence.begin() + static_cast<std::ptrdiff_t>(i + order));
  return out;
}

std::size_t NGramTable::total() const {
  std::size_t t = 0;
  for (const auto& [gram, c] : counts) t += c;
  return t;
}

NGramTable build_ngram_table(const std::vector<std::vector<std::string>>& sequences, int n) {
  NGramTable table;
  table.n = n;
  for (const auto& seq : sequences) {
    std::map<NGram, std::size_t> local;
    for (auto& g : extract_ngrams(seq, n)) ++local[std::move(g)];
    for (auto& [g, c] : local) {
      if (c >= 2) table.repeated.insert(g);
      table.counts[g] += c;
    }
  }
  return table;
}

bool NGramAnalysis::intersections_empty() const {
  return std::all_of(per_n.begin(), per_n.end(),
                     [](const ClassNGramComparison& c) { return c.intersection.empty(); });
}

NGramAnalysis class_ngram_report(std::span<const dynamic::BehaviorReport> reports,
                                 dynamic::OpKind kind, std::span<const int> n_values) {
  std::vector<std::vector<std::string>> malicious, benign;
  std::vector<Label> labels;
  for (const auto& r : reports) {
    if (!r.label) continue;
    labels.push_back(*r.label);
    (*r.label == Label::Malicious ? malicious : benign).push_back(dynamic::registry_sequence(r, kind));
  }
  require_both_classes(labels, "n-gram comparison");

  NGramAnalysis analysis;
  analysis.kind = kind;
  for (int n : n_values) {
    ClassNGramComparison cmp;
    cmp.n = n;
    cmp.malicious = build_ngram_table(malicious, n);
    cmp.benign = build_ngram_table(benign, n);
    for (const auto& [g, c] : cmp.malicious.counts)
      if (cmp.benign.counts.contains(g)) cmp.intersection.insert(g);
    analysis.per_n.push_back(std::move(cmp));
  }
  return analysis;
}

namespace {

using Json = nlohmann::ordered_json;

Json table_json(const NGramTable& t) {
  Json counts = Json::array();
  for (const auto& [g, c] : t.counts) counts.push_back({{"ngram", g}, {"count", c}});
  Json repeated = Json::array();
  for (const auto& g : t.repeated) repeated.push_back(g);
  return {{"total", t.total()}, {"distinct", t.counts.size()}, {"counts", counts}, {"repeated", repeated}};
}

std::string join(const NGram& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? " -> " : "") + g[i];
  return s;
}

}  // namespace

std::string ngram_report_json(const NGramAnalysis& a) {
  Json doc;
  doc["operation"] = std::string(dynamic::to_string(a.kind));
  doc["intersection_empty"] = a.intersections_empty();
  Json per_n = Json::array();
  for (const auto& c : a.per_n) {
    Json inter = Json::array();
    for (const auto& g : c.intersection) inter.push_back(g);
    per_n.push_back({{"n", c.n},
                     {"malicious", table_json(c.malicious)},
                     {"benign", table_json(c.benign)},
                     {"intersection", inter},
                     {"intersection_empty", c.intersection.empty()}});
  }
  doc["per_n"] = std::move(per_n);
  return doc.dump(2) + "\n";
}

std::string ngram_summary_text(const NGramAnalysis& a) {
  std::ostringstream out;
  out << "registry " << dynamic::to_string(a.kind) << " sequences\n";
  for (const auto& c : a.per_n) {
    out << "n=" << c.n << ": malicious " << c.malicious.counts.size() << " distinct ("
        << c.malicious.repeated.size() << " repeated), benign " << c.benign.counts.size()
        << " distinct (" << c.benign.repeated.size() << " repeated), shared " << c.intersection.size()
        << "\n";
    for (const auto& g : c.malicious.repeated) out << "  repeated in malicious: " << join(g) << "\n";
    for (const auto& g : c.benign.repeated) out << "  repeated in benign: " << join(g) << "\n";
  }
  out << (a.intersections_empty() ? "no sequence is shared between malicious and benign samples\n"
                                  : "some sequences occur in both classes\n");
  return out.str();
}

CooccurrenceMatrix cooccurrence_probability(std::span<const dynamic::BehaviorReport> reports,
                                            dynamic::OpKind kind) {
  std::set<std::string> seen;
  for (const auto& r : reports)
    for (const auto& k : r.registry(kind)) seen.insert(k);
  return cooccurrence_probability(reports, kind, {seen.begin(), seen.end()});
}

CooccurrenceMatrix cooccurrence_probability(std::span<const dynamic::BehaviorReport> reports,
                                            dynamic::OpKind kind, std::vector<std::string> tokens) {
  const std::size_t m = tokens.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index.emplace(tokens[i], i);
  std::vector<std::size_t> single(m, 0), joint(m * m, 0);
  for (const auto& r : reports) {
    std::set<std::size_t> present;
    for (const auto& k : r.registry(kind))
      if (auto it = index.find(k); it != index.end()) present.insert(it->second);
    for (std::size_t a : present) {
      ++single[a];
      for (std::size_t b : present) ++joint[a * m + b];
    }
  }
  CooccurrenceMatrix out;
  out.tokens = std::move(tokens);
  out.probability.assign(m * m, std::nullopt);
  for (std::size_t a = 0; a < m; ++a) {
    if (single[a] == 0) continue;
    for (std::size_t b = 0; b < m; ++b)
      out.probability[a * m + b] =
          static_cast<double>(joint[a * m + b]) / static_cast<double>(single[a]);
  }
  return out;
}

}  // namespace ransd::features
