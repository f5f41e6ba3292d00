#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ransd/common/matrix.hpp"
#include "ransd/dynamic/vocabulary.hpp"
#include "ransd/pe/batch.hpp"

namespace ransd::dynamic {

struct SparseRow {
  std::string path;
  SparseFeatureVector features;
};

struct DynamicDataset {
  TokenVocabulary vocabulary;
  std::vector<SparseRow> rows;
  std::vector<LedgerEntry> ledger;
};

/// Parses every report, builds the vocabulary from rows whose `in_training` flag is set
/// (all rows when the mask is empty) and vectorises everything against it.
/// Throws EmptyCorpus when nothing could be parsed or the training partition is empty.
DynamicDataset batch_extract_dynamic(const std::vector<ManifestEntry>& manifest,
                                     std::size_t min_df = 1,
                                     const std::vector<bool>& in_training = {});

/// Parses all reports in manifest order; failures go to `ledger`.
std::vector<BehaviorReport> load_reports(const std::vector<ManifestEntry>& manifest,
                                         std::vector<LedgerEntry>& ledger);

/// `path,label,i1 i2 ...` per line, with a header row.
void write_sparse_dataset(std::ostream& out, const std::vector<SparseRow>& rows);
std::vector<SparseRow> read_sparse_dataset(const std::string& path, std::size_t dimension);

/// Dense 0/1 matrix restricted to `columns`, one row per sample.
Matrix to_dense(const std::vector<SparseRow>& rows, std::span<const std::size_t> columns);

}  // namespace ransd::dynamic
