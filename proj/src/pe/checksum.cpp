#include "ransd/pe/checksum.hpp"

namespace ransd::pe {

ChecksumResult validate_checksum(const ParsedPE& pe, const RawImage& image) {
  const auto bytes = image.view();
  const std::uint64_t skip = pe.checksum_offset;
  // The CheckSum field reads as zero; e_lfanew may be odd so mask per byte.
  auto byte_at = [&](std::uint64_t k) -> std::uint32_t {
    return (k >= skip && k < skip + 4) ? 0u : bytes[k];
  };
  std::uint32_t sum = 0;
  for (std::uint64_t i = 0; i < bytes.size(); i += 2) {
    std::uint32_t word = byte_at(i);
    if (i + 1 < bytes.size()) word |= byte_at(i + 1) << 8;
    sum += word;
    sum = (sum & 0xFFFF) + (sum >> 16);
  }
  sum = (sum & 0xFFFF) + (sum >> 16);
  ChecksumResult result;
  result.stored = pe.optional.checksum;
  result.computed = sum + static_cast<std::uint32_t>(bytes.size());
  result.matches = result.stored != 0 && result.stored == result.computed;
  return result;
}

}  // namespace ransd::pe
