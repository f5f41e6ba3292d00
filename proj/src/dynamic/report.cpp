#include "ransd/dynamic/report.hpp"

#include <map>

#include "json.hpp"
#include "ransd/common/error.hpp"
#include "ransd/common/io.hpp"
#include "ransd/dynamic/normalize.hpp"

namespace ransd::dynamic {
namespace {

using Json = nlohmann::ordered_json;

// Fixture schema key names, per operation kind (create, delete, read, write).
constexpr std::array<std::array<std::string_view, 2>, 4> kRegistryKeys = {{
    {"regkey_opened", "regkey_created"},
    {"regkey_deleted", ""},
    {"regkey_read", ""},
    {"regkey_written", ""},
}};
constexpr std::array<std::string_view, 4> kFileKeys = {"file_created", "file_deleted", "file_read",
                                                       "file_written"};

std::optional<std::string> as_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) {
    for (const char* key : {"name", "domain", "filepath", "path", "key"}) {
      auto it = v.find(key);
      if (it != v.end() && it->is_string()) return it->get<std::string>();
    }
  }
  return std::nullopt;
}

// Looks up `key` in behavior.summary, then behavior, then the document root.
const Json* find_key(const Json& doc, std::string_view key) {
  const Json& behavior = doc.at("behavior");
  for (const Json* scope : {&behavior.at("summary"), &behavior, &doc}) {
    auto it = scope->find(key);
    if (it != scope->end()) return &*it;
  }
  return nullptr;
}

template <typename Normalize>
void append_list(const Json& doc, std::string_view key, std::vector<std::string>& out,
                 Normalize normalize) {
  if (key.empty()) return;
  const Json* arr = find_key(doc, key);
  if (!arr || !arr->is_array()) return;
  for (const auto& v : *arr) {
    auto text = as_text(v);
    if (!text) continue;
    std::string token = normalize(*text);
    if (!token.empty()) out.push_back(std::move(token));
  }
}

void read_apistats(const Json& doc, std::vector<std::string>& out) {
  const Json* stats = find_key(doc, "apistats");
  if (!stats || !stats->is_object()) return;
  for (const auto& [pid, calls] : stats->items()) {
    if (!calls.is_object()) continue;
    for (const auto& [api, count] : calls.items()) {
      std::string token = normalize_token(api);
      if (!token.empty()) out.push_back(std::move(token));
    }
  }
}

}  // namespace

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::Create: return "create";
    case OpKind::Delete: return "delete";
    case OpKind::Read: return "read";
    case OpKind::Write: return "write";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view text) {
  for (OpKind k : kOpKinds)
    if (to_string(k) == text) return k;
  throw Error(ErrorKind::InvalidArgument, "unknown operation kind '" + std::string(text) + "'");
}

BehaviorReport parse_report(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedJson, e.what());
  }
  if (!doc.is_object() || !doc.contains("behavior") || !doc["behavior"].is_object() ||
      !doc["behavior"].contains("summary") || !doc["behavior"]["summary"].is_object())
    throw Error(ErrorKind::MissingBehaviorSection, "report has no behavior.summary object");

  BehaviorReport r;
  read_apistats(doc, r.api_calls);
  for (OpKind k : kOpKinds) {
    const auto i = static_cast<std::size_t>(k);
    for (auto key : kRegistryKeys[i]) append_list(doc, key, r.registry_ops[i], normalize_registry_key);
    append_list(doc, kFileKeys[i], r.file_ops[i], normalize_path);
  }
  append_list(doc, "directory_created", r.dirs_created, normalize_path);
  append_list(doc, "dll_loaded", r.dlls, normalize_path);
  append_list(doc, "strings", r.strings, normalize_token);
  append_list(doc, "dropped", r.drop_extensions,
              [](const std::string& name) { return file_extension(name); });

  if (const Json* domains = find_key(doc, "domains"); domains && domains->is_array()) {
    append_list(doc, "domains", r.net_domains, normalize_token);
  } else if (auto net = doc.find("network"); net != doc.end() && net->is_object()) {
    if (auto d = net->find("domains"); d != net->end() && d->is_array())
      for (const auto& v : *d)
        if (auto text = as_text(v); text && !normalize_token(*text).empty())
          r.net_domains.push_back(normalize_token(*text));
  }
  return r;
}

BehaviorReport load_report(const std::filesystem::path& path) {
  BehaviorReport r = parse_report(io::read_text(path));
  r.source_path = path.string();
  return r;
}

std::vector<std::string> registry_sequence(const BehaviorReport& report, OpKind kind) {
  return report.registry(kind);
}

std::string report_to_json(const BehaviorReport& report) {
  Json doc;
  // One pseudo-process per repeat so duplicate API names survive a round trip.
  Json apistats = Json::object();
  std::map<std::string, int> seen;
  for (const auto& api : report.api_calls) {
    const int pid = 1000 + seen[api]++;
    apistats[std::to_string(pid)][api] = 1;
  }
  Json summary = Json::object();
  for (OpKind k : kOpKinds) {
    const auto i = static_cast<std::size_t>(k);
    summary[std::string(kRegistryKeys[i][0])] = report.registry_ops[i];
    summary[std::string(kFileKeys[i])] = report.file_ops[i];
  }
  summary["directory_created"] = report.dirs_created;
  summary["dll_loaded"] = report.dlls;
  doc["behavior"]["apistats"] = std::move(apistats);
  doc["behavior"]["summary"] = std::move(summary);
  Json domains = Json::array();
  for (const auto& d : report.net_domains) domains.push_back({{"domain", d}});
  doc["network"]["domains"] = std::move(domains);
  Json dropped = Json::array();
  for (std::size_t i = 0; i < report.drop_extensions.size(); ++i)
    dropped.push_back({{"name", "dropped_" + std::to_string(i) + "." + report.drop_extensions[i]}});
  doc["dropped"] = std::move(dropped);
  doc["strings"] = report.strings;
  return doc.dump(2) + "\n";
}

}  // namespace ransd::dynamic
