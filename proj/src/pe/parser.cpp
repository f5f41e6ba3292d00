#include "ransd/pe/parser.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "ransd/common/error.hpp"
#include "ransd/common/io.hpp"
#include "ransd/pe/entropy.hpp"

namespace ransd::pe {
namespace {

constexpr std::size_t kDosHeaderSize = 64;
constexpr std::size_t kCoffHeaderSize = 20;
constexpr std::size_t kSectionHeaderSize = 40;
constexpr std::size_t kPe32FixedSize = 96;
constexpr std::size_t kPe32PlusFixedSize = 112;
constexpr std::uint32_t kMaxResourceDepth = 32;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::uint64_t offset, std::uint64_t width) const {
    return offset <= bytes_.size() && width <= bytes_.size() - offset;
  }

  template <typename T>
  T read(std::uint64_t offset) const {
    if (!has(offset, sizeof(T)))
      throw PeError(ErrorKind::TruncatedHeader, offset, "file ends inside a header structure");
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<T>(static_cast<T>(bytes_[offset + i]) << (8 * i));
    return value;
  }

  template <typename T>
  std::optional<T> try_read(std::uint64_t offset) const {
    if (!has(offset, sizeof(T))) return std::nullopt;
    return read<T>(offset);
  }

  std::size_t size() const { return bytes_.size(); }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
};

DosHeader read_dos(const Reader& r) {
  DosHeader d;
  d.e_magic = r.read<std::uint16_t>(0x00);
  if (d.e_magic != 0x5A4D) throw PeError(ErrorKind::MalformedDos, 0, "missing MZ magic");
  d.e_cblp = r.read<std::uint16_t>(0x02);
  d.e_cp = r.read<std::uint16_t>(0x04);
  d.e_crlc = r.read<std::uint16_t>(0x06);
  d.e_cparhdr = r.read<std::uint16_t>(0x08);
  d.e_minalloc = r.read<std::uint16_t>(0x0A);
  d.e_maxalloc = r.read<std::uint16_t>(0x0C);
  d.e_ss = r.read<std::uint16_t>(0x0E);
  d.e_sp = r.read<std::uint16_t>(0x10);
  d.e_csum = r.read<std::uint16_t>(0x12);
  d.e_ip = r.read<std::uint16_t>(0x14);
  d.e_cs = r.read<std::uint16_t>(0x16);
  d.e_lfarlc = r.read<std::uint16_t>(0x18);
  d.e_ovno = r.read<std::uint16_t>(0x1A);
  for (std::uint64_t off = 0x1C; off < 0x24; off += 2) d.reserved_sum += r.read<std::uint16_t>(off);
  d.e_oemid = r.read<std::uint16_t>(0x24);
  d.e_oeminfo = r.read<std::uint16_t>(0x26);
  for (std::uint64_t off = 0x28; off < 0x3C; off += 2) d.reserved_sum += r.read<std::uint16_t>(off);
  d.e_lfanew = r.read<std::uint32_t>(0x3C);
  return d;
}

CoffFileHeader read_coff(const Reader& r, std::uint64_t at) {
  CoffFileHeader c;
  c.machine = r.read<std::uint16_t>(at + 0);
  c.number_of_sections = r.read<std::uint16_t>(at + 2);
  c.time_date_stamp = r.read<std::uint32_t>(at + 4);
  c.pointer_to_symbol_table = r.read<std::uint32_t>(at + 8);
  c.number_of_symbols = r.read<std::uint32_t>(at + 12);
  c.size_of_optional_header = r.read<std::uint16_t>(at + 16);
  c.characteristics = r.read<std::uint16_t>(at + 18);
  return c;
}

OptionalHeader read_optional(const Reader& r, std::uint64_t at, std::uint16_t declared_size) {
  OptionalHeader o;
  o.magic = r.read<std::uint16_t>(at);
  if (o.magic != kMagicPe32 && o.magic != kMagicPe32Plus)
    throw PeError(ErrorKind::UnsupportedOptionalMagic, at, "optional header magic is neither PE32 nor PE32+");
  const bool plus = o.is_pe32_plus();
  const std::size_t fixed = plus ? kPe32PlusFixedSize : kPe32FixedSize;
  if (!r.has(at, fixed))
    throw PeError(ErrorKind::TruncatedHeader, r.size(), "file ends inside the optional header");

  o.major_linker_version = r.read<std::uint8_t>(at + 2);
  o.minor_linker_version = r.read<std::uint8_t>(at + 3);
  o.size_of_code = r.read<std::uint32_t>(at + 4);
  o.size_of_initialized_data = r.read<std::uint32_t>(at + 8);
  o.size_of_uninitialized_data = r.read<std::uint32_t>(at + 12);
  o.address_of_entry_point = r.read<std::uint32_t>(at + 16);
  o.base_of_code = r.read<std::uint32_t>(at + 20);
  o.image_base = plus ? r.read<std::uint64_t>(at + 24) : r.read<std::uint32_t>(at + 28);
  o.section_alignment = r.read<std::uint32_t>(at + 32);
  o.file_alignment = r.read<std::uint32_t>(at + 36);
  o.major_operating_system_version = r.read<std::uint16_t>(at + 40);
  o.minor_operating_system_version = r.read<std::uint16_t>(at + 42);
  o.major_image_version = r.read<std::uint16_t>(at + 44);
  o.minor_image_version = r.read<std::uint16_t>(at + 46);
  o.major_subsystem_version = r.read<std::uint16_t>(at + 48);
  o.minor_subsystem_version = r.read<std::uint16_t>(at + 50);
  o.size_of_image = r.read<std::uint32_t>(at + 56);
  o.size_of_headers = r.read<std::uint32_t>(at + 60);
  o.checksum = r.read<std::uint32_t>(at + 64);
  o.subsystem = r.read<std::uint16_t>(at + 68);
  o.dll_characteristics = r.read<std::uint16_t>(at + 70);
  if (plus) {
    o.size_of_stack_reserve = r.read<std::uint64_t>(at + 72);
    o.size_of_stack_commit = r.read<std::uint64_t>(at + 80);
    o.size_of_heap_reserve = r.read<std::uint64_t>(at + 88);
    o.size_of_heap_commit = r.read<std::uint64_t>(at + 96);
    o.loader_flags = r.read<std::uint32_t>(at + 104);
    o.number_of_rva_and_sizes = r.read<std::uint32_t>(at + 108);
  } else {
    o.size_of_stack_reserve = r.read<std::uint32_t>(at + 72);
    o.size_of_stack_commit = r.read<std::uint32_t>(at + 76);
    o.size_of_heap_reserve = r.read<std::uint32_t>(at + 80);
    o.size_of_heap_commit = r.read<std::uint32_t>(at + 84);
    o.loader_flags = r.read<std::uint32_t>(at + 88);
    o.number_of_rva_and_sizes = r.read<std::uint32_t>(at + 92);
  }

  // Directories beyond the declared optional-header size or the file end are treated as absent.
  std::size_t dir_count = std::min<std::size_t>(o.number_of_rva_and_sizes, o.directories.size());
  const std::size_t room = declared_size > fixed ? (declared_size - fixed) / 8 : 0;
  dir_count = std::min(dir_count, room);
  for (std::size_t i = 0; i < dir_count; ++i) {
    const std::uint64_t off = at + fixed + 8 * i;
    if (!r.has(off, 8)) break;
    o.directories[i].virtual_address = r.read<std::uint32_t>(off);
    o.directories[i].size = r.read<std::uint32_t>(off + 4);
  }
  return o;
}

class ResourceWalker {
 public:
  ResourceWalker(const Reader& r, std::uint64_t base, ParsedPE& pe)
      : r_(r), base_(base), pe_(pe) {}

  ResourceSummary walk() {
    visit(0, 1);
    return summary_;
  }

 private:
  void visit(std::uint32_t dir_offset, std::uint32_t depth) {
    if (depth > kMaxResourceDepth || !visited_.insert(dir_offset).second) {
      truncated();
      return;
    }
    const std::uint64_t at = base_ + dir_offset;
    auto named = r_.try_read<std::uint16_t>(at + 12);
    auto ids = r_.try_read<std::uint16_t>(at + 14);
    if (!named || !ids) {
      truncated();
      return;
    }
    summary_.depth = std::max(summary_.depth, depth);
    const std::uint32_t entries = std::uint32_t{*named} + *ids;
    for (std::uint32_t i = 0; i < entries; ++i) {
      auto target = r_.try_read<std::uint32_t>(at + 16 + 8 * std::uint64_t{i} + 4);
      if (!target) {
        truncated();
        return;
      }
      if (*target & 0x80000000u) {
        visit(*target & 0x7FFFFFFFu, depth + 1);
      } else {
        auto size = r_.try_read<std::uint32_t>(base_ + *target + 4);
        if (!size) {
          truncated();
          continue;
        }
        ++summary_.entry_count;
        summary_.total_size += *size;
        summary_.max_size = std::max(summary_.max_size, *size);
      }
    }
  }

  void truncated() { pe_.warnings |= static_cast<std::uint32_t>(Warning::ResourceTruncated); }

  const Reader& r_;
  std::uint64_t base_;
  ParsedPE& pe_;
  ResourceSummary summary_;
  std::set<std::uint32_t> visited_;
};

LoadConfigSummary read_load_config(const Reader& r, std::uint64_t at, bool plus, ParsedPE& pe) {
  LoadConfigSummary lc;
  auto size = r.try_read<std::uint32_t>(at);
  if (!size) {
    pe.warnings |= static_cast<std::uint32_t>(Warning::LoadConfigTruncated);
    return lc;
  }
  lc.size = *size;
  // A field is read only when it lies inside both the declared structure size and the file.
  auto field = [&](std::uint64_t rel, std::size_t width) -> std::uint64_t {
    if (rel + width > lc.size) return 0;
    if (!r.has(at + rel, width)) {
      pe.warnings |= static_cast<std::uint32_t>(Warning::LoadConfigTruncated);
      return 0;
    }
    switch (width) {
      case 2: return r.read<std::uint16_t>(at + rel);
      case 4: return r.read<std::uint32_t>(at + rel);
      default: return r.read<std::uint64_t>(at + rel);
    }
  };
  lc.time_date_stamp = static_cast<std::uint32_t>(field(4, 4));
  lc.major_version = static_cast<std::uint16_t>(field(8, 2));
  lc.minor_version = static_cast<std::uint16_t>(field(10, 2));
  lc.global_flags_clear = static_cast<std::uint32_t>(field(12, 4));
  lc.global_flags_set = static_cast<std::uint32_t>(field(16, 4));
  lc.critical_section_default_timeout = static_cast<std::uint32_t>(field(20, 4));
  if (plus) {
    lc.decommit_free_block_threshold = field(24, 8);
    lc.decommit_total_free_threshold = field(32, 8);
    lc.lock_prefix_table = field(40, 8);
    lc.maximum_allocation_size = field(48, 8);
    lc.virtual_memory_threshold = field(56, 8);
    lc.security_cookie = field(88, 8);
  } else {
    lc.decommit_free_block_threshold = field(24, 4);
    lc.decommit_total_free_threshold = field(28, 4);
    lc.lock_prefix_table = field(32, 4);
    lc.maximum_allocation_size = field(36, 4);
    lc.virtual_memory_threshold = field(40, 4);
    lc.security_cookie = field(60, 4);
  }
  return lc;
}

}  // namespace

RawImage load_image(const std::string& path) {
  return RawImage{io::read_bytes(path), path};
}

std::optional<std::uint64_t> rva_to_offset(const ParsedPE& pe, std::uint32_t rva,
                                           std::uint64_t file_size) {
  for (const auto& s : pe.sections) {
    const std::uint64_t extent = std::max(s.virtual_size, s.size_of_raw_data);
    if (rva >= s.virtual_address && rva < std::uint64_t{s.virtual_address} + extent) {
      const std::uint64_t delta = rva - s.virtual_address;
      if (delta >= s.size_of_raw_data) return std::nullopt;  // zero-filled tail, not in file
      const std::uint64_t off = std::uint64_t{s.pointer_to_raw_data} + delta;
      return off < file_size ? std::optional(off) : std::nullopt;
    }
  }
  if (rva < pe.optional.size_of_headers && rva < file_size) return rva;
  return std::nullopt;
}

ParsedPE parse_pe(const RawImage& image) {
  const Reader r(image.view());
  if (r.size() < kDosHeaderSize)
    throw PeError(ErrorKind::TruncatedHeader, r.size(), "image shorter than a DOS header");

  ParsedPE pe;
  pe.dos = read_dos(r);

  const std::uint64_t sig = pe.dos.e_lfanew;
  if (sig < kDosHeaderSize || !r.has(sig, 4))
    throw PeError(ErrorKind::BadPeOffset, sig, "e_lfanew does not point inside the file");
  if (r.read<std::uint32_t>(sig) != 0x00004550u)
    throw PeError(ErrorKind::MissingPeSignature, sig, "expected PE\\0\\0 signature");
  pe.signature_offset = sig;

  const std::uint64_t coff_at = sig + 4;
  pe.coff = read_coff(r, coff_at);
  const std::uint64_t opt_at = coff_at + kCoffHeaderSize;
  pe.optional = read_optional(r, opt_at, pe.coff.size_of_optional_header);
  pe.checksum_offset = opt_at + 64;

  const auto& opt = pe.optional;
  auto bad_alignment = [](std::uint32_t a) { return a != 0 && !std::has_single_bit(a); };
  if (bad_alignment(opt.file_alignment) || bad_alignment(opt.section_alignment))
    pe.warnings |= static_cast<std::uint32_t>(Warning::BadAlignment);

  const std::uint64_t table_at = opt_at + pe.coff.size_of_optional_header;
  if (pe.coff.number_of_sections == 0) pe.warnings |= static_cast<std::uint32_t>(Warning::NoSections);
  pe.sections.reserve(pe.coff.number_of_sections);
  for (std::uint32_t i = 0; i < pe.coff.number_of_sections; ++i) {
    const std::uint64_t at = table_at + kSectionHeaderSize * i;
    if (!r.has(at, kSectionHeaderSize))
      throw PeError(ErrorKind::TruncatedHeader, at, "file ends inside the section table");
    SectionHeader s;
    auto name = image.view().subspan(at, 8);
    s.name.assign(name.begin(), std::find(name.begin(), name.end(), 0));
    s.virtual_size = r.read<std::uint32_t>(at + 8);
    s.virtual_address = r.read<std::uint32_t>(at + 12);
    s.size_of_raw_data = r.read<std::uint32_t>(at + 16);
    s.pointer_to_raw_data = r.read<std::uint32_t>(at + 20);
    s.characteristics = r.read<std::uint32_t>(at + 36);

    const std::uint64_t begin = std::min<std::uint64_t>(s.pointer_to_raw_data, r.size());
    const std::uint64_t end = std::min<std::uint64_t>(begin + s.size_of_raw_data, r.size());
    if (std::uint64_t{s.pointer_to_raw_data} + s.size_of_raw_data > r.size())
      pe.warnings |= static_cast<std::uint32_t>(Warning::SectionDataOutsideFile);
    s.entropy = compute_entropy(image.view().subspan(begin, end - begin));
    pe.sections.push_back(std::move(s));
  }

  if (const auto& dir = opt.directories[kResourceDirectory]; dir.present()) {
    if (auto off = rva_to_offset(pe, dir.virtual_address, r.size())) {
      pe.resources = ResourceWalker(r, *off, pe).walk();
    } else {
      pe.warnings |= static_cast<std::uint32_t>(Warning::DirectoryUnmapped);
    }
  }
  if (const auto& dir = opt.directories[kLoadConfigDirectory]; dir.present()) {
    if (auto off = rva_to_offset(pe, dir.virtual_address, r.size())) {
      pe.load_config = read_load_config(r, *off, opt.is_pe32_plus(), pe);
    } else {
      pe.warnings |= static_cast<std::uint32_t>(Warning::DirectoryUnmapped);
    }
  }
  return pe;
}

}  // namespace ransd::pe
