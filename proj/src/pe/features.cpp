#include "ransd/pe/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ransd/common/error.hpp"
#include "ransd/pe/checksum.hpp"
#include "ransd/pe/entropy.hpp"

namespace ransd::pe {
namespace {

// Grouped as: optional header (26), section summary (12), DOS header (18),
// file header (7 raw + 2 section-derived), resources (4), load config (13), derived (7).
constexpr std::array<std::string_view, kStaticFeatureCount> kNames = {
    // optional header
    "Magic", "MajorLinkerVersion", "MinorLinkerVersion", "SizeOfCode", "SizeOfInitializedData",
    "SizeOfUninitializedData", "AddressOfEntryPoint", "BaseOfCode", "ImageBase",
    "SectionAlignment", "FileAlignment", "MajorOperatingSystemVersion", "MajorImageVersion",
    "MinorImageVersion", "MajorSubsystemVersion", "SizeOfImage", "SizeOfHeaders", "CheckSum",
    "Subsystem", "DllCharacteristics", "SizeOfStackReserve", "SizeOfStackCommit",
    "SizeOfHeapReserve", "SizeOfHeapCommit", "LoaderFlags", "NumberOfRvaAndSizes",
    // section headers
    "SectionCount", "SectionEntropyMean", "SectionEntropyMin", "SectionEntropyMax",
    "SectionRawSizeMean", "SectionRawSizeMin", "SectionRawSizeMax", "SectionVirtualSizeMean",
    "SectionVirtualSizeMin", "SectionVirtualSizeMax", "ExecutableSections", "WritableSections",
    // DOS header
    "e_magic", "e_cblp", "e_cp", "e_crlc", "e_cparhdr", "e_minalloc", "e_maxalloc", "e_ss",
    "e_sp", "e_csum", "e_ip", "e_cs", "e_lfarlc", "e_ovno", "e_oemid", "e_oeminfo", "e_lfanew",
    "e_res_sum",
    // file header
    "Machine", "NumberOfSections", "TimeDateStamp", "PointerToSymbolTable", "NumberOfSymbols",
    "SizeOfOptionalHeader", "Characteristics", "HighEntropySections", "ZeroSizeSections",
    // resource directory
    "ResourceEntryCount", "ResourceTotalSize", "ResourceMaxSize", "ResourceDirectoryDepth",
    // load config directory
    "LoadConfigSize", "LoadConfigTimeDateStamp", "LoadConfigMajorVersion",
    "LoadConfigMinorVersion", "GlobalFlagsClear", "GlobalFlagsSet",
    "CriticalSectionDefaultTimeout", "DeCommitFreeBlockThreshold", "DeCommitTotalFreeThreshold",
    "LockPrefixTable", "MaximumAllocationSize", "VirtualMemoryThreshold", "SecurityCookie",
    // derived
    "FileEntropy", "HeaderEntropy", "ChecksumMatches", "ImportDirectorySize",
    "ExportDirectorySize", "ImageToFileRatio", "CodeToFileRatio",
};

constexpr double kHighEntropy = 7.0;

struct Triple {
  double mean = 0, min = 0, max = 0;
};

template <typename Fn>
Triple summarize(const std::vector<SectionHeader>& sections, Fn value) {
  if (sections.empty()) return {};
  Triple t{0.0, value(sections.front()), value(sections.front())};
  for (const auto& s : sections) {
    const double v = value(s);
    t.mean += v;
    t.min = std::min(t.min, v);
    t.max = std::max(t.max, v);
  }
  t.mean /= static_cast<double>(sections.size());
  // keep min <= mean <= max under rounding
  t.mean = std::clamp(t.mean, t.min, t.max);
  return t;
}

class Writer {
 public:
  explicit Writer(std::array<double, kStaticFeatureCount>& out) : out_(out) {}
  template <typename T>
  Writer& operator<<(T value) {
    out_.at(pos_++) = static_cast<double>(value);
    return *this;
  }
  std::size_t written() const { return pos_; }

 private:
  std::array<double, kStaticFeatureCount>& out_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::array<std::string_view, kStaticFeatureCount>& static_feature_names() { return kNames; }

std::string static_manifest_text() {
  std::string text;
  for (auto name : kNames) {
    text += name;
    text += '\n';
  }
  return text;
}

std::optional<std::size_t> static_feature_index(std::string_view name) {
  auto it = std::find(kNames.begin(), kNames.end(), name);
  if (it == kNames.end()) return std::nullopt;
  return static_cast<std::size_t>(it - kNames.begin());
}

double StaticFeatureVector::operator[](std::string_view name) const {
  auto idx = static_feature_index(name);
  if (!idx) throw Error(ErrorKind::InvalidArgument, "unknown static feature " + std::string(name));
  return values[*idx];
}

StaticFeatureVector extract_static_features(const ParsedPE& pe, const RawImage& image) {
  StaticFeatureVector fv;
  Writer w(fv.values);
  const auto& o = pe.optional;
  const auto& d = pe.dos;
  const auto& c = pe.coff;
  const auto& sections = pe.sections;
  const double file_size = static_cast<double>(image.bytes.size());

  w << o.magic << o.major_linker_version << o.minor_linker_version << o.size_of_code
    << o.size_of_initialized_data << o.size_of_uninitialized_data << o.address_of_entry_point
    << o.base_of_code << o.image_base << o.section_alignment << o.file_alignment
    << o.major_operating_system_version << o.major_image_version << o.minor_image_version
    << o.major_subsystem_version << o.size_of_image << o.size_of_headers << o.checksum
    << o.subsystem << o.dll_characteristics << o.size_of_stack_reserve << o.size_of_stack_commit
    << o.size_of_heap_reserve << o.size_of_heap_commit << o.loader_flags
    << o.number_of_rva_and_sizes;

  const auto entropy = summarize(sections, [](const SectionHeader& s) { return s.entropy; });
  const auto raw = summarize(sections, [](const SectionHeader& s) { return double(s.size_of_raw_data); });
  const auto virt = summarize(sections, [](const SectionHeader& s) { return double(s.virtual_size); });
  auto count_if = [&](auto pred) { return std::count_if(sections.begin(), sections.end(), pred); };
  w << sections.size() << entropy.mean << entropy.min << entropy.max << raw.mean << raw.min
    << raw.max << virt.mean << virt.min << virt.max
    << count_if([](const SectionHeader& s) { return (s.characteristics & kScnMemExecute) != 0; })
    << count_if([](const SectionHeader& s) { return (s.characteristics & kScnMemWrite) != 0; });

  w << d.e_magic << d.e_cblp << d.e_cp << d.e_crlc << d.e_cparhdr << d.e_minalloc << d.e_maxalloc
    << d.e_ss << d.e_sp << d.e_csum << d.e_ip << d.e_cs << d.e_lfarlc << d.e_ovno << d.e_oemid
    << d.e_oeminfo << d.e_lfanew << d.reserved_sum;

  w << c.machine << c.number_of_sections << c.time_date_stamp << c.pointer_to_symbol_table
    << c.number_of_symbols << c.size_of_optional_header << c.characteristics
    << count_if([](const SectionHeader& s) { return s.entropy > kHighEntropy; })
    << count_if([](const SectionHeader& s) { return s.size_of_raw_data == 0; });

  const ResourceSummary res = pe.resources.value_or(ResourceSummary{});
  w << res.entry_count << res.total_size << res.max_size << res.depth;

  const LoadConfigSummary lc = pe.load_config.value_or(LoadConfigSummary{});
  w << lc.size << lc.time_date_stamp << lc.major_version << lc.minor_version
    << lc.global_flags_clear << lc.global_flags_set << lc.critical_section_default_timeout
    << lc.decommit_free_block_threshold << lc.decommit_total_free_threshold
    << lc.lock_prefix_table << lc.maximum_allocation_size << lc.virtual_memory_threshold
    << lc.security_cookie;

  const auto bytes = image.view();
  const std::uint64_t header_len =
      std::min<std::uint64_t>(o.size_of_headers ? o.size_of_headers : bytes.size(), bytes.size());
  auto ratio = [&](double num) { return file_size > 0 ? num / file_size : 0.0; };
  w << compute_entropy(bytes) << compute_entropy(bytes.first(header_len))
    << (validate_checksum(pe, image).matches ? 1 : 0)
    << o.directories[kImportDirectory].size << o.directories[kExportDirectory].size
    << ratio(o.size_of_image) << ratio(o.size_of_code);

  if (w.written() != kStaticFeatureCount)
    throw Error(ErrorKind::Format, "static feature writer out of sync with manifest");
  return fv;
}

}  // namespace ransd::pe
