#pragma once

#include <cstdint>

#include "ransd/pe/parser.hpp"

namespace ransd::pe {

struct ChecksumResult {
  std::uint32_t stored = 0;
  std::uint32_t computed = 0;
  bool matches = false;
};

/// Standard image checksum: 16-bit ones-complement sum over the file with the CheckSum
/// field read as zero, plus the file length. A stored value of 0 never matches.
ChecksumResult validate_checksum(const ParsedPE& pe, const RawImage& image);

}  // namespace ransd::pe
