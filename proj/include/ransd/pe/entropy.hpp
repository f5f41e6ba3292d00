#pragma once

#include <cstdint>
#include <span>

namespace ransd::pe {

/// Shannon entropy of the byte histogram in bits per byte, in [0, 8]. Empty input gives 0.
double compute_entropy(std::span<const std::uint8_t> bytes);

}  // namespace ransd::pe
