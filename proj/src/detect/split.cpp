#include "ransd/detect/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ransd/common/error.hpp"
#include "ransd/common/random.hpp"

namespace ransd::detect {
namespace {

std::array<std::vector<std::size_t>, 2> shuffled_by_class(std::span<const Label> labels,
                                                          std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[to_bit(labels[i])].push_back(i);
  for (std::size_t c = 0; c < 2; ++c) {
    Rng rng(derive_seed(seed, c));
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
  }
  return by_class;
}

}  // namespace

Split stratified_split(std::span<const Label> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1]");
  require_both_classes(labels, "stratified split");
  Split split;
  for (const auto& members : shuffled_by_class(labels, seed)) {
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    split.train.insert(split.train.end(), members.begin(),
                       members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
                      members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2 || k > labels.size())
    throw Error(ErrorKind::FoldTooSmall, "need 2 <= k <= n for k-fold splitting");
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t position = 0;
  for (const auto& members : shuffled_by_class(labels, seed))
    for (std::size_t i : members) folds[position++ % k].push_back(i);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace ransd::detect
