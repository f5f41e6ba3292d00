#pragma once

#include <string>
#include <string_view>

namespace ransd::dynamic {

/// Lower-cases, maps control characters to spaces and trims surrounding whitespace.
std::string normalize_token(std::string_view raw);

/// Registry key canonical form: lower case, single backslashes, short hive names
/// (hklm, hkcu, hkcr, hku, hkcc); per-user SID hives fold into hkcu.
std::string normalize_registry_key(std::string_view raw);

/// File/directory path canonical form: lower case, single backslashes, volume letter
/// dropped, per-user profile directories replaced by `%userprofile%`.
std::string normalize_path(std::string_view raw);

/// Lower-case extension without the dot; empty when the last component has none.
std::string file_extension(std::string_view path);

}  // namespace ransd::dynamic
