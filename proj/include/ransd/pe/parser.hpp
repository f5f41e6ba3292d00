#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ransd::pe {

struct RawImage {
  std::vector<std::uint8_t> bytes;
  std::string source_path;

  std::span<const std::uint8_t> view() const { return bytes; }
};

RawImage load_image(const std::string& path);

struct DosHeader {
  std::uint16_t e_magic = 0;
  std::uint16_t e_cblp = 0;
  std::uint16_t e_cp = 0;
  std::uint16_t e_crlc = 0;
  std::uint16_t e_cparhdr = 0;
  std::uint16_t e_minalloc = 0;
  std::uint16_t e_maxalloc = 0;
  std::uint16_t e_ss = 0;
  std::uint16_t e_sp = 0;
  std::uint16_t e_csum = 0;
  std::uint16_t e_ip = 0;
  std::uint16_t e_cs = 0;
  std::uint16_t e_lfarlc = 0;
  std::uint16_t e_ovno = 0;
  std::uint16_t e_oemid = 0;
  std::uint16_t e_oeminfo = 0;
  std::uint32_t e_lfanew = 0;
  // Sum of the fourteen reserved words (e_res[4] and e_res2[10]).
  std::uint32_t reserved_sum = 0;
};

struct CoffFileHeader {
  std::uint16_t machine = 0;
  std::uint16_t number_of_sections = 0;
  std::uint32_t time_date_stamp = 0;
  std::uint32_t pointer_to_symbol_table = 0;
  std::uint32_t number_of_symbols = 0;
  std::uint16_t size_of_optional_header = 0;
  std::uint16_t characteristics = 0;
};

inline constexpr std::uint16_t kMagicPe32 = 0x10B;
inline constexpr std::uint16_t kMagicPe32Plus = 0x20B;

struct DataDirectory {
  std::uint32_t virtual_address = 0;
  std::uint32_t size = 0;

  bool present() const { return virtual_address != 0 && size != 0; }
};

enum DirectoryIndex : std::size_t {
  kExportDirectory = 0,
  kImportDirectory = 1,
  kResourceDirectory = 2,
  kLoadConfigDirectory = 10,
};

/// Optional header with PE32/PE32+ width differences widened to 64 bits.
struct OptionalHeader {
  std::uint16_t magic = 0;
  std::uint8_t major_linker_version = 0;
  std::uint8_t minor_linker_version = 0;
  std::uint32_t size_of_code = 0;
  std::uint32_t size_of_initialized_data = 0;
  std::uint32_t size_of_uninitialized_data = 0;
  std::uint32_t address_of_entry_point = 0;
  std::uint32_t base_of_code = 0;
  std::uint64_t image_base = 0;
  std::uint32_t section_alignment = 0;
  std::uint32_t file_alignment = 0;
  std::uint16_t major_operating_system_version = 0;
  std::uint16_t minor_operating_system_version = 0;
  std::uint16_t major_image_version = 0;
  std::uint16_t minor_image_version = 0;
  std::uint16_t major_subsystem_version = 0;
  std::uint16_t minor_subsystem_version = 0;
  std::uint32_t size_of_image = 0;
  std::uint32_t size_of_headers = 0;
  std::uint32_t checksum = 0;
  std::uint16_t subsystem = 0;
  std::uint16_t dll_characteristics = 0;
  std::uint64_t size_of_stack_reserve = 0;
  std::uint64_t size_of_stack_commit = 0;
  std::uint64_t size_of_heap_reserve = 0;
  std::uint64_t size_of_heap_commit = 0;
  std::uint32_t loader_flags = 0;
  std::uint32_t number_of_rva_and_sizes = 0;
  std::array<DataDirectory, 16> directories{};

  bool is_pe32_plus() const { return magic == kMagicPe32Plus; }
};

inline constexpr std::uint32_t kScnMemExecute = 0x20000000;
inline constexpr std::uint32_t kScnMemWrite = 0x80000000;

struct SectionHeader {
  std::string name;
  std::uint32_t virtual_size = 0;
  std::uint32_t virtual_address = 0;
  std::uint32_t size_of_raw_data = 0;
  std::uint32_t pointer_to_raw_data = 0;
  std::uint32_t characteristics = 0;
  // Shannon entropy of the raw bytes actually present in the file.
  double entropy = 0.0;
};

struct ResourceSummary {
  std::uint32_t entry_count = 0;  // leaf data entries
  std::uint64_t total_size = 0;
  std::uint32_t max_size = 0;
  std::uint32_t depth = 0;  // directory levels, root = 1
};

struct LoadConfigSummary {
  std::uint32_t size = 0;
  std::uint32_t time_date_stamp = 0;
  std::uint16_t major_version = 0;
  std::uint16_t minor_version = 0;
  std::uint32_t global_flags_clear = 0;
  std::uint32_t global_flags_set = 0;
  std::uint32_t critical_section_default_timeout = 0;
  std::uint64_t decommit_free_block_threshold = 0;
  std::uint64_t decommit_total_free_threshold = 0;
  std::uint64_t lock_prefix_table = 0;
  std::uint64_t maximum_allocation_size = 0;
  std::uint64_t virtual_memory_threshold = 0;
  std::uint64_t security_cookie = 0;
};

/// Anomalies that do not stop parsing.
enum class Warning : std::uint32_t {
  NoSections = 1u << 0,
  BadAlignment = 1u << 1,
  SectionDataOutsideFile = 1u << 2,
  ResourceTruncated = 1u << 3,
  LoadConfigTruncated = 1u << 4,
  DirectoryUnmapped = 1u << 5,
};

struct ParsedPE {
  DosHeader dos;
  std::uint64_t signature_offset = 0;
  CoffFileHeader coff;
  OptionalHeader optional;
  std::uint64_t checksum_offset = 0;
  std::vector<SectionHeader> sections;
  std::optional<ResourceSummary> resources;
  std::optional<LoadConfigSummary> load_config;
  std::uint32_t warnings = 0;

  bool has_warning(Warning w) const { return (warnings & static_cast<std::uint32_t>(w)) != 0; }
};

/// Parses headers, section table and the resource / load-config directories.
/// Throws PeError (MalformedDos, BadPeOffset, MissingPeSignature, TruncatedHeader,
/// UnsupportedOptionalMagic) carrying the failing offset.
ParsedPE parse_pe(const RawImage& image);

/// Maps an RVA to a file offset via the section table; nullopt when unmapped.
std::optional<std::uint64_t> rva_to_offset(const ParsedPE& pe, std::uint32_t rva,
                                           std::uint64_t file_size);

}  // namespace ransd::pe
