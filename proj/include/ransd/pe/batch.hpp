#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ransd/common/labels.hpp"
#include "ransd/pe/features.hpp"

namespace ransd {

struct ManifestEntry {
  std::string path;
  std::optional<Label> label;
};

/// Reads a `path,label` CSV. Relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

struct LedgerEntry {
  std::string path;
  std::string error;
};

}  // namespace ransd

namespace ransd::pe {

struct StaticRow {
  std::string path;
  StaticFeatureVector features;
};

struct StaticDataset {
  std::vector<StaticRow> rows;
  std::vector<LedgerEntry> ledger;
};

/// Extracts every manifest entry; failures go to the ledger and keep manifest order otherwise.
StaticDataset batch_extract_static(const std::vector<ManifestEntry>& manifest);

/// `path,<89 features>,label`
void write_static_csv(std::ostream& out, const std::vector<StaticRow>& rows);
std::vector<StaticRow> read_static_csv(const std::string& path);
/// Array of row objects with the same field names as the CSV.
std::string static_rows_to_json(const std::vector<StaticRow>& rows);

}  // namespace ransd::pe
