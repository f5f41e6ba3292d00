#include "ransd/dynamic/normalize.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace ransd::dynamic {
namespace {

std::string lower_clean(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c < 0x20 || c == 0x7F) c = ' ';
    out += static_cast<char>(std::tolower(c));
  }
  const auto first = out.find_first_not_of(' ');
  if (first == std::string::npos) return {};
  const auto last = out.find_last_not_of(' ');
  return out.substr(first, last - first + 1);
}

// Forward slashes become backslashes, runs collapse, trailing separators go.
std::string canonical_separators(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '/') c = '\\';
    if (c == '\\' && !out.empty() && out.back() == '\\') continue;
    out += c;
  }
  while (out.size() > 1 && out.back() == '\\') out.pop_back();
  return out;
}

bool starts_with_component(const std::string& s, std::string_view prefix) {
  return s.starts_with(prefix) && (s.size() == prefix.size() || s[prefix.size()] == '\\');
}

// Replaces a leading `prefix` component with `replacement`.
bool replace_prefix(std::string& s, std::string_view prefix, std::string_view replacement) {
  if (!starts_with_component(s, prefix)) return false;
  s = std::string(replacement) + s.substr(prefix.size());
  return true;
}

}  // namespace

std::string normalize_token(std::string_view raw) { return lower_clean(raw); }

std::string normalize_registry_key(std::string_view raw) {
  std::string key = canonical_separators(lower_clean(raw));
  if (!key.empty() && key.front() == '\\' && !key.starts_with("\\registry")) key.erase(0, 1);

  static const std::array<std::pair<std::string_view, std::string_view>, 7> hives = {{
      {"hkey_local_machine", "hklm"},
      {"\\registry\\machine", "hklm"},
      {"hkey_current_user", "hkcu"},
      {"hkey_classes_root", "hkcr"},
      {"hkey_current_config", "hkcc"},
      {"hkey_users", "hku"},
      {"\\registry\\user", "hku"},
  }};
  for (const auto& [long_form, short_form] : hives)
    if (replace_prefix(key, long_form, short_form)) break;

  // hku\<user sid>\... is the same key as hkcu\... for the sandboxed user.
  if (starts_with_component(key, "hku")) {
    const auto sid_end = key.find('\\', 4);
    const std::string sid = key.substr(4, sid_end == std::string::npos ? std::string::npos : sid_end - 4);
    if (sid.starts_with("s-1-5-21-")) {
      std::string rest = sid_end == std::string::npos ? "" : key.substr(sid_end);
      if (sid.ends_with("_classes"))
        key = "hkcu\\software\\classes" + rest;
      else
        key = "hkcu" + rest;
    }
  }
  return key;
}

std::string normalize_path(std::string_view raw) {
  std::string path = canonical_separators(lower_clean(raw));
  if (path.starts_with("\\??\\")) path.erase(0, 4);
  if (path.size() >= 2 && std::isalpha(static_cast<unsigned char>(path[0])) && path[1] == ':')
    path.erase(0, 2);
  for (std::string_view profile_root : {"\\users\\", "\\documents and settings\\"}) {
    if (path.starts_with(profile_root)) {
      const auto user_end = path.find('\\', profile_root.size());
      const std::string user = path.substr(profile_root.size(), user_end - profile_root.size());
      if (user != "public" && user != "default" && user != "all users") {
        path = "%userprofile%" + (user_end == std::string::npos ? std::string() : path.substr(user_end));
      }
      break;
    }
  }
  return path;
}

std::string file_extension(std::string_view path) {
  const auto slash = path.find_last_of("\\/");
  const std::string_view name = slash == std::string_view::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot == std::string_view::npos || dot + 1 == name.size()) return {};
  return lower_clean(name.substr(dot + 1));
}

}  // namespace ransd::dynamic
