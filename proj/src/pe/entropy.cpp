#include "ransd/pe/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ransd::pe {

double compute_entropy(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return 0.0;
  std::array<std::uint64_t, 256> histogram{};
  for (std::uint8_t b : bytes) ++histogram[b];
  const double n = static_cast<double>(bytes.size());
  double h = 0.0;
  for (std::uint64_t count : histogram) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  // -0.0 and tiny rounding excursions past the bounds
  return std::clamp(h, 0.0, 8.0);
}

}  // namespace ransd::pe
