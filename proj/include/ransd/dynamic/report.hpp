#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ransd/common/labels.hpp"

namespace ransd::dynamic {

enum class OpKind { Create = 0, Delete = 1, Read = 2, Write = 3 };
inline constexpr std::array<OpKind, 4> kOpKinds = {OpKind::Create, OpKind::Delete, OpKind::Read,
                                                   OpKind::Write};
std::string_view to_string(OpKind kind);
OpKind parse_op_kind(std::string_view text);

/// One sandbox run. Token lists keep report order and multiplicity.
struct BehaviorReport {
  std::vector<std::string> api_calls;
  std::array<std::vector<std::string>, 4> registry_ops;
  std::array<std::vector<std::string>, 4> file_ops;
  std::vector<std::string> dirs_created;
  std::vector<std::string> net_domains;
  std::vector<std::string> drop_extensions;
  std::vector<std::string> strings;
  std::vector<std::string> dlls;
  std::string source_path;
  std::optional<Label> label;

  const std::vector<std::string>& registry(OpKind kind) const {
    return registry_ops[static_cast<std::size_t>(kind)];
  }
  std::vector<std::string>& registry(OpKind kind) {
    return registry_ops[static_cast<std::size_t>(kind)];
  }
  const std::vector<std::string>& files(OpKind kind) const {
    return file_ops[static_cast<std::size_t>(kind)];
  }
  std::vector<std::string>& files(OpKind kind) { return file_ops[static_cast<std::size_t>(kind)]; }
};

/// Reads a Cuckoo-style report. Throws MalformedJson, or MissingBehaviorSection when the
/// document has no `behavior.summary` object.
BehaviorReport parse_report(std::string_view json_text);
BehaviorReport load_report(const std::filesystem::path& path);

/// Registry keys touched by `kind`, in report order.
std::vector<std::string> registry_sequence(const BehaviorReport& report, OpKind kind);

/// Report as JSON in the same schema parse_report reads. Used for fixtures and synthetic corpora.
std::string report_to_json(const BehaviorReport& report);

}  // namespace ransd::dynamic
