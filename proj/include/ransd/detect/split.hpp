#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ransd/common/labels.hpp"

namespace ransd::detect {

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Per-class shuffle then round(fraction * class size) into train. Throws SingleClass.
Split stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed);

/// Assigns every index to one of k folds, dealing each class round-robin after a seeded
/// shuffle. Returns validation index sets (ascending). Throws FoldTooSmall when k < 2 or k > n.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed);

}  // namespace ransd::detect
