#include "ransd/pe/batch.hpp"

#include "json.hpp"

#include <ostream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"
#include "ransd/common/parallel.hpp"

namespace ransd {

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  const auto table = csv::read_file(manifest_path.string());
  if (table.header.size() < 2 || table.header[0] != "path" || table.header[1] != "label")
    throw Error(ErrorKind::Format, manifest_path.string() + ": expected header 'path,label'");
  const auto base = manifest_path.parent_path();
  std::vector<ManifestEntry> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.empty() || row[0].empty())
      throw Error(ErrorKind::Format, manifest_path.string() + ": row without a path");
    std::filesystem::path p(row[0]);
    if (p.is_relative()) p = base / p;
    out.push_back({p.lexically_normal().string(), parse_label(row.size() > 1 ? row[1] : "")});
  }
  return out;
}

}  // namespace ransd

namespace ransd::pe {

StaticDataset batch_extract_static(const std::vector<ManifestEntry>& manifest) {
  std::vector<std::optional<StaticRow>> rows(manifest.size());
  std::vector<std::string> errors(manifest.size());
  parallel_for(manifest.size(), [&](std::size_t i) {
    try {
      const RawImage image = load_image(manifest[i].path);
      StaticRow row{manifest[i].path, extract_static_features(parse_pe(image), image)};
      row.features.label = manifest[i].label;
      rows[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  StaticDataset out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (rows[i])
      out.rows.push_back(std::move(*rows[i]));
    else
      out.ledger.push_back({manifest[i].path, errors[i]});
  }
  return out;
}

void write_static_csv(std::ostream& out, const std::vector<StaticRow>& rows) {
  std::vector<std::string> fields{"path"};
  for (auto name : static_feature_names()) fields.emplace_back(name);
  fields.emplace_back("label");
  csv::write_row(out, fields);
  for (const auto& row : rows) {
    fields.clear();
    fields.push_back(row.path);
    for (double v : row.features.values) fields.push_back(csv::format_number(v));
    fields.emplace_back(row.features.label ? to_string(*row.features.label) : "");
    csv::write_row(out, fields);
  }
}

std::vector<StaticRow> read_static_csv(const std::string& path) {
  const auto table = csv::read_file(path);
  const auto& names = static_feature_names();
  if (table.header.size() != kStaticFeatureCount + 2 || table.header.front() != "path" ||
      table.header.back() != "label" ||
      !std::equal(names.begin(), names.end(), table.header.begin() + 1))
    throw Error(ErrorKind::Format, path + ": header does not match the static feature manifest");
  std::vector<StaticRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size())
      throw Error(ErrorKind::Format, path + ": row has " + std::to_string(r.size()) + " fields");
    StaticRow row;
    row.path = r.front();
    for (std::size_t i = 0; i < kStaticFeatureCount; ++i)
      row.features.values[i] = csv::parse_number(r[i + 1]);
    row.features.label = parse_label(r.back());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string static_rows_to_json(const std::vector<StaticRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  const auto& names = static_feature_names();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    obj["path"] = row.path;
    for (std::size_t i = 0; i < kStaticFeatureCount; ++i)
      obj[std::string(names[i])] = row.features.values[i];
    obj["label"] = row.features.label ? nlohmann::ordered_json(to_string(*row.features.label))
                                      : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

}  // namespace ransd::pe
