#include "ransd/dynamic/batch.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"
#include "ransd/common/parallel.hpp"

namespace ransd::dynamic {

namespace {

struct Parsed {
  std::vector<std::optional<BehaviorReport>> reports;
  std::vector<std::string> errors;
};

Parsed parse_all(const std::vector<ManifestEntry>& manifest) {
  Parsed p{std::vector<std::optional<BehaviorReport>>(manifest.size()),
           std::vector<std::string>(manifest.size())};
  parallel_for(manifest.size(), [&](std::size_t i) {
    try {
      BehaviorReport r = load_report(manifest[i].path);
      r.label = manifest[i].label;
      p.reports[i] = std::move(r);
    } catch (const std::exception& e) {
      p.errors[i] = e.what();
    }
  });
  return p;
}

}  // namespace

std::vector<BehaviorReport> load_reports(const std::vector<ManifestEntry>& manifest,
                                         std::vector<LedgerEntry>& ledger) {
  Parsed p = parse_all(manifest);
  std::vector<BehaviorReport> out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (p.reports[i])
      out.push_back(std::move(*p.reports[i]));
    else
      ledger.push_back({manifest[i].path, p.errors[i]});
  }
  return out;
}

DynamicDataset batch_extract_dynamic(const std::vector<ManifestEntry>& manifest, std::size_t min_df,
                                     const std::vector<bool>& in_training) {
  if (manifest.empty()) throw Error(ErrorKind::EmptyCorpus, "manifest lists no reports");
  if (!in_training.empty() && in_training.size() != manifest.size())
    throw Error(ErrorKind::LengthMismatch, "training mask does not match the manifest");

  DynamicDataset out;
  Parsed p = parse_all(manifest);
  std::vector<BehaviorReport> training;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (!p.reports[i])
      out.ledger.push_back({manifest[i].path, p.errors[i]});
    else if (in_training.empty() || in_training[i])
      training.push_back(*p.reports[i]);
  }
  if (training.empty()) throw Error(ErrorKind::EmptyCorpus, "no parseable training reports");

  out.vocabulary = TokenVocabulary::build(training, min_df);
  for (std::size_t i = 0; i < manifest.size(); ++i)
    if (p.reports[i]) out.rows.push_back({manifest[i].path, vectorize(*p.reports[i], out.vocabulary)});
  return out;
}

void write_sparse_dataset(std::ostream& out, const std::vector<SparseRow>& rows) {
  out << "path,label,active\n";
  for (const auto& row : rows) {
    std::string indices;
    for (std::size_t i = 0; i < row.features.active.size(); ++i) {
      if (i) indices += ' ';
      indices += std::to_string(row.features.active[i]);
    }
    csv::write_row(out, {row.path,
                         row.features.label ? std::string(to_string(*row.features.label)) : "",
                         indices});
  }
}

std::vector<SparseRow> read_sparse_dataset(const std::string& path, std::size_t dimension) {
  const auto table = csv::read_file(path);
  if (table.header != std::vector<std::string>{"path", "label", "active"})
    throw Error(ErrorKind::Format, path + ": expected header 'path,label,active'");
  std::vector<SparseRow> rows;
  for (const auto& r : table.rows) {
    if (r.size() != 3) throw Error(ErrorKind::Format, path + ": malformed sparse row");
    SparseRow row;
    row.path = r[0];
    row.features.dimension = dimension;
    row.features.label = parse_label(r[1]);
    std::istringstream in(r[2]);
    std::string item;
    while (in >> item) {
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), idx);
      if (ec != std::errc{} || p != item.data() + item.size() || idx >= dimension ||
          (!row.features.active.empty() && idx <= row.features.active.back()))
        throw Error(ErrorKind::Format, path + ": bad active index '" + item + "'");
      row.features.active.push_back(idx);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix to_dense(const std::vector<SparseRow>& rows, std::span<const std::size_t> columns) {
  Matrix m(rows.size(), columns.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < columns.size(); ++j)
      m(r, j) = rows[r].features.contains(columns[j]) ? 1.0 : 0.0;
  return m;
}

}  // namespace ransd::dynamic
