#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ransd::io {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ransd::io
