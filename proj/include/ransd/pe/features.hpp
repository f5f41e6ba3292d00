#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "ransd/common/labels.hpp"
#include "ransd/pe/parser.hpp"

namespace ransd::pe {

inline constexpr std::size_t kStaticFeatureCount = 89;

/// Canonical feature names in output order. Mirrors data/static_manifest.txt.
const std::array<std::string_view, kStaticFeatureCount>& static_feature_names();

/// Manifest file contents: one name per line, trailing newline.
std::string static_manifest_text();

/// Index of a feature name, nullopt when unknown.
std::optional<std::size_t> static_feature_index(std::string_view name);

struct StaticFeatureVector {
  std::array<double, kStaticFeatureCount> values{};
  std::optional<Label> label;

  double operator[](std::string_view name) const;
};

StaticFeatureVector extract_static_features(const ParsedPE& pe, const RawImage& image);

}  // namespace ransd::pe
